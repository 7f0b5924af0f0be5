#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/generators.hpp"
#include "twistfix/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace twistfix;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return Rational(p, d); }

/// exp(2 pi i s^T M t) from the matrix in floating point.
Complex omega_oracle(const Group& g, const RationalMatrix& m, std::size_t s, std::size_t t) {
  const auto a = g.element(s);
  const auto b = g.element(t);
  double phase = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      phase += static_cast<double>(a[i] * b[j]) * boost::rational_cast<double>(m[i][j]);
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

/// Brute-force cocycle identity in floating point.
bool identity_oracle(const Cocycle& w) {
  const auto& g = w.group();
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (std::size_t t = 0; t < g.size(); ++t) {
      for (std::size_t r = 0; r < g.size(); ++r) {
        const Complex lhs = w.value(s, t) * w.value(g.add(s, t), r);
        const Complex rhs = w.value(s, g.add(t, r)) * w.value(t, r);
        if (std::abs(lhs - rhs) > 1e-9) return false;
      }
    }
  }
  return true;
}

/// Kernel of h by floating-point evaluation of w(s,t) conj w(t,s).
std::set<std::size_t> symmetrizer_oracle(const Cocycle& w) {
  std::set<std::size_t> out;
  const auto n = w.group().size();
  for (std::size_t s = 0; s < n; ++s) {
    bool ok = true;
    for (std::size_t t = 0; t < n && ok; ++t) ok = std::abs(w.value(s, t) * std::conj(w.value(t, s)) - 1.0) < 1e-9;
    if (ok) out.insert(s);
  }
  return out;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("matrix cocycles agree with the closed form") {
  testgen::Gen gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = gen.group(36);
    const auto m = gen.bicharacter(g);
    const auto w = Cocycle::from_matrix(g, m);
    for (std::size_t s = 0; s < g.size(); ++s) {
      for (std::size_t t = 0; t < g.size(); ++t) CHECK(std::abs(w.value(s, t) - omega_oracle(g, m, s, t)) < 1e-12);
    }
  }
}

TEST_CASE("validate accepts every bicharacter cocycle (property)") {
  testgen::Gen gen(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = gen.group(24);
    const auto w = Cocycle::from_matrix(g, gen.bicharacter(g));
    const auto v = validate(w);
    CHECK(v.valid);
    CHECK_FALSE(v.failing_triple.has_value());
    CHECK(identity_oracle(w));
  }
  CHECK(validate(Cocycle::trivial(Group::finite({3, 3}))).valid);
}

TEST_CASE("perturbed tables fail validation with a genuine failing triple") {
  const auto g = Group::finite({2, 2});
  auto table = Cocycle::from_matrix(g, {{q(0, 1), q(0, 1)}, {q(1, 2), q(0, 1)}}).table();
  const auto s = g.index({1, 0});
  const auto t = g.index({0, 1});
  table[s * g.size() + t] = table[s * g.size() + t] * Phase(1, 8);
  const auto w = Cocycle::from_table(g, table);
  const auto v = validate(w);
  REQUIRE_FALSE(v.valid);
  REQUIRE(v.failing_triple.has_value());
  const auto [a, b, c] = *v.failing_triple;
  CHECK(w(a, b) * w(g.add(a, b), c) != w(a, g.add(b, c)) * w(b, c));
  CHECK_FALSE(identity_oracle(w));
}

TEST_CASE("denominators must divide gcd of the orders") {
  const auto g = Group::finite({4, 2});
  CHECK_NOTHROW(Cocycle::from_matrix(g, {{q(1, 4), q(1, 2)}, {q(0, 1), q(1, 2)}}));
  CHECK_THROWS_AS(Cocycle::from_matrix(g, {{q(0, 1), q(1, 4)}, {q(0, 1), q(0, 1)}}), std::invalid_argument);
  CHECK_THROWS_AS(Cocycle::from_matrix(g, {{q(1, 3), q(0, 1)}, {q(0, 1), q(0, 1)}}), std::invalid_argument);
  CHECK_THROWS_AS(Cocycle::from_matrix(g, {{q(0, 1)}}), std::invalid_argument);
}

TEST_CASE("tables are normalized at the identity") {
  const auto g = Group::finite({3});
  std::vector<Phase> table(9, Phase(1, 5));
  const auto w = Cocycle::from_table(g, table);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(w(g.identity(), s).is_one());
    CHECK(w(s, g.identity()).is_one());
  }
  CHECK(validate(w).valid);
}

TEST_CASE("antisymmetrization") {
  const auto g = Group::finite({4, 4});
  SUBCASE("symmetric matrix gives the trivial bicharacter") {
    const auto w = Cocycle::from_matrix(g, {{q(1, 4), q(3, 4)}, {q(3, 4), q(1, 2)}});
    CHECK(antisymmetrize(w).is_trivial());
  }
  SUBCASE("standard matrix on Z4xZ4 gives exp(2 pi i (bc - ad) / 4)") {
    const auto w = Cocycle::from_matrix(g, {{q(0, 1), q(0, 1)}, {q(1, 4), q(0, 1)}});
    const auto h = antisymmetrize(w);
    CHECK(h.is_bicharacter());
    for (std::size_t s = 0; s < g.size(); ++s) {
      for (std::size_t t = 0; t < g.size(); ++t) {
        const auto x = g.element(s);
        const auto y = g.element(t);
        CHECK(h(s, t) == Phase(x[1] * y[0] - x[0] * y[1], 4));
        CHECK((h(s, t) * h(t, s)).is_one());
      }
    }
    const auto anti = antisymmetric_part(w);
    CHECK(anti[0][1] == q(-1, 4));
    CHECK(anti[1][0] == q(1, 4));
  }
  SUBCASE("coboundaries have trivial antisymmetrization on Z2xZ2") {
    const auto z = Group::finite({2, 2});
    testgen::Gen gen(3);
    for (int trial = 0; trial < 20; ++trial) CHECK(antisymmetrize(coboundary(z, gen.cochain(z))).is_trivial());
  }
}

TEST_CASE("h_omega is a homomorphism into the dual (property)") {
  testgen::Gen gen(99);
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = gen.group(24);
    const auto h = antisymmetrize(Cocycle::from_matrix(g, gen.bicharacter(g)));
    for (int k = 0; k < 30; ++k) {
      const auto a = static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(g.size()) - 1));
      const auto b = static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(g.size()) - 1));
      const auto t = static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(g.size()) - 1));
      CHECK(h(g.add(a, b), t) == h(a, t) * h(b, t));
      CHECK(h(t, g.add(a, b)) == h(t, a) * h(t, b));
    }
  }
}

TEST_CASE("symmetrizer subgroups") {
  const auto g = Group::finite({4, 4});
  CHECK(symmetrizer(Cocycle::trivial(g)).size() == 16);
  const auto w1 = Cocycle::from_matrix(g, {{q(0, 1), q(0, 1)}, {q(1, 4), q(0, 1)}});
  CHECK(symmetrizer(w1) == std::vector<std::size_t>{g.identity()});
  const auto w2 = Cocycle::from_matrix(g, {{q(0, 1), q(0, 1)}, {q(1, 2), q(0, 1)}});
  const auto s2 = symmetrizer(w2);
  CHECK(s2.size() == 4);
  for (auto s : s2) {
    const auto e = g.element(s);
    CHECK(e[0] % 2 == 0);
    CHECK(e[1] % 2 == 0);
  }
}

TEST_CASE("symmetrizer is a subgroup invariant under coboundary twists (property)") {
  testgen::Gen gen(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = gen.group(24);
    const auto w = Cocycle::from_matrix(g, gen.bicharacter(g));
    const auto sym = as_set(symmetrizer(w));
    CHECK(sym == symmetrizer_oracle(w));
    for (auto a : sym) {
      CHECK(sym.count(g.neg(a)) == 1);
      for (auto b : sym) CHECK(sym.count(g.add(a, b)) == 1);
    }
    const auto twisted = w * coboundary(g, gen.cochain(g));
    CHECK(as_set(symmetrizer(twisted)) == sym);
  }
}

TEST_CASE("similarity") {
  const auto g = Group::finite({4, 4});
  const auto w = Cocycle::from_matrix(g, {{q(0, 1), q(0, 1)}, {q(1, 4), q(0, 1)}});
  CHECK_FALSE(similar(w, Cocycle::trivial(g)));
  const auto shifted = Cocycle::from_matrix(g, {{q(1, 4), q(1, 2)}, {q(3, 4), q(3, 4)}});
  CHECK(similar(w, shifted));
  CHECK_THROWS_AS(similar(w, Cocycle::trivial(Group::finite({4}))), std::invalid_argument);

  const auto z = Group::finite({2, 2});
  testgen::Gen gen(8);
  const auto base = Cocycle::from_matrix(z, {{q(0, 1), q(1, 2)}, {q(0, 1), q(0, 1)}});
  for (int trial = 0; trial < 10; ++trial) {
    const auto other = base * coboundary(z, gen.cochain(z));
    CHECK(similar(base, other));
    const auto witness = find_similarity(base, other);
    REQUIRE(witness.has_value());
    CHECK(base * coboundary(z, *witness) == other);
  }
  CHECK_FALSE(find_similarity(base, Cocycle::trivial(z)).has_value());
}

TEST_CASE("similarity is an equivalence relation on a sample (property)") {
  testgen::Gen gen(55);
  const auto g = Group::finite({2, 4});
  std::vector<Cocycle> sample;
  for (int i = 0; i < 8; ++i) {
    const auto w = Cocycle::from_matrix(g, gen.bicharacter(g));
    sample.push_back(w);
    sample.push_back(w * coboundary(g, gen.cochain(g)));
  }
  for (const auto& a : sample) {
    CHECK(similar(a, a));
    for (const auto& b : sample) {
      CHECK(similar(a, b) == similar(b, a));
      CHECK(similar(a, b) == find_similarity(a, b).has_value());
      for (const auto& c : sample) {
        if (similar(a, b) && similar(b, c)) CHECK(similar(a, c));
      }
    }
  }
}

TEST_CASE("coboundaries") {
  const auto z2 = Group::finite({2});
  CHECK(coboundary(z2, {Phase::one(), Phase::one()}) == Cocycle::trivial(z2));
  const auto w = coboundary(z2, {Phase::one(), Phase(1, 4)});
  CHECK(w(1, 1) == Phase(1, 2));
  CHECK(std::abs(w.value(1, 1) + 1.0) < 1e-15);
  const auto z3 = Group::finite({3});
  testgen::Gen gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = coboundary(z3, gen.cochain(z3, 9));
    CHECK(validate(c).valid);
    CHECK(identity_oracle(c));
    CHECK(symmetrizer(c).size() == 3);
  }
  CHECK_THROWS_AS(coboundary(z2, {Phase(1, 2), Phase::one()}), std::invalid_argument);
}

TEST_CASE("standard cocycle and parsing") {
  const auto g = Group::finite({6, 4});
  const auto w = standard_cocycle(g);
  REQUIRE(w.matrix().has_value());
  CHECK((*w.matrix())[1][0] == q(1, 2));
  CHECK(standard_cocycle(Group::finite({5})) == Cocycle::trivial(Group::finite({5})));
  const auto m = parse_rational_matrix("[[0, 0], [1/4, -3/4]]");
  CHECK(m == RationalMatrix{{q(0, 1), q(0, 1)}, {q(1, 4), q(-3, 4)}});
  CHECK_THROWS(parse_rational_matrix("[[0, 0], [1/4"));
  CHECK_THROWS(parse_rational_matrix("[[0, x]]"));
}
