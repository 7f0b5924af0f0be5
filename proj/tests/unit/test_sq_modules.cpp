#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/generators.hpp"
#include "twistfix/errors.hpp"
#include "twistfix/sq_modules.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

using namespace twistfix;

namespace {

constexpr double kPi = std::numbers::pi;

LatticeFunction random_function(testgen::Gen& gen, int k, int radius) {
  LatticeFunction f(k, radius);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = gen.complex();
  return f;
}

/// Direct evaluation of sum_nu f(nu) z^nu at z = exp(2 pi i a / M), k = 1.
Complex direct_transform(const LatticeFunction& f, int a, int M) {
  Complex s = 0.0;
  for (std::int64_t nu = -f.radius(); nu <= f.radius(); ++nu) {
    s += f.at({nu}) * std::polar(1.0, 2 * kPi * static_cast<double>(a * nu) / M);
  }
  return s;
}

}  // namespace

TEST_CASE("Laurent operators") {
  const auto id = laurent_operator(LatticeFunction::delta(1, 2, {0}), 4);
  CHECK((id - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() == 0.0);

  const auto shift = laurent_operator(LatticeFunction::delta(1, 2, {1}), 4);
  for (int t = 0; t < 9; ++t) {
    for (int s = 0; s < 9; ++s) CHECK(shift(t, s) == Complex(t == s + 1 ? 1.0 : 0.0));
  }

  SUBCASE("tridiagonal spectrum") {
    LatticeFunction phi(1, 1);
    phi[0] = 1.0;
    phi[2] = 1.0;
    const int w = 5;
    const int n = 2 * w + 1;
    Eigen::SelfAdjointEigenSolver<Matrix> es(laurent_operator(phi, w));
    std::vector<double> oracle;
    for (int k = 1; k <= n; ++k) oracle.push_back(2 * std::cos(k * kPi / (n + 1)));
    std::sort(oracle.begin(), oracle.end());
    for (int i = 0; i < n; ++i) CHECK(std::abs(es.eigenvalues()(i) - oracle[static_cast<std::size_t>(i)]) < 1e-12);
  }

  SUBCASE("adjoint symbol") {
    testgen::Gen gen(151);
    const auto phi = random_function(gen, 2, 2);
    LatticeFunction star(2, 2);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      auto m = phi.window().element(i);
      for (auto& c : m) c = -c;
      star[phi.window().index(m)] = std::conj(phi[i]);
    }
    CHECK((laurent_operator(phi, 3).adjoint() - laurent_operator(star, 3)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("bracket symbols") {
  const auto d = LatticeFunction::delta(1, 2, {1});
  const auto e = LatticeFunction::delta(1, 2, {-1}, 2.0);
  const auto b = bracket_symbol(single(d), single(e));
  CHECK(b.radius() == 4);
  CHECK(b.at({-2}) == Complex(2.0));
  CHECK(b.l1_norm() == doctest::Approx(2.0));

  SUBCASE("transform of the bracket is conj(xi^) eta^ (property)") {
    testgen::Gen gen(157);
    for (int trial = 0; trial < 4; ++trial) {
      const auto xi = random_function(gen, 1, 3);
      const auto eta = random_function(gen, 1, 3);
      const auto br = bracket_symbol(single(xi), single(eta));
      const int M = 16;
      const auto bt = torus_transform(br, M);
      for (int a = 0; a < M; ++a) {
        const Complex oracle = std::conj(direct_transform(xi, a, M)) * direct_transform(eta, a, M);
        CHECK(std::abs(bt[static_cast<std::size_t>(a)] - oracle) < 1e-12);
      }
    }
  }
}

TEST_CASE("torus transform") {
  testgen::Gen gen(163);
  const auto f = random_function(gen, 1, 4);
  const int M = 9;
  const auto ft = torus_transform(f, M);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) lhs += std::norm(f[i]);
  for (const auto& v : ft) rhs += std::norm(v);
  CHECK(std::abs(lhs - rhs / M) < 1e-12);
  CHECK_THROWS_AS(torus_transform(f, 8), std::invalid_argument);

  // Right translation multiplies the transform by z^{-t}.
  const auto g = right_translate(f, {2});
  const auto gt = torus_transform(g, 16);
  const auto ft16 = torus_transform(f, 16);
  for (int a = 0; a < 16; ++a) {
    const Complex z_minus_t = std::polar(1.0, -2 * kPi * 2 * a / 16.0);
    CHECK(std::abs(gt[static_cast<std::size_t>(a)] - z_minus_t * ft16[static_cast<std::size_t>(a)]) < 1e-12);
  }
}

TEST_CASE("ket and bra operators") {
  testgen::Gen gen(167);
  const SequenceVector xi{{random_function(gen, 1, 3), random_function(gen, 1, 2)}};
  const SequenceVector eta{{random_function(gen, 1, 2), random_function(gen, 1, 3)}};
  const auto report = ket_bra_check(xi, eta, 32);
  CHECK(report.module_window == 35);
  CHECK(report.laurent_defect < 1e-12);
  CHECK(report.rank_one_defect < 1e-12);
  CHECK(report.warnings.empty());
  CHECK((bra_operator(xi, 8, 11) - ket_operator(xi, 8, 11).adjoint()).cwiseAbs().maxCoeff() == 0.0);

  const auto truncated = ket_bra_check(xi, eta, 32, 16);
  CHECK_FALSE(truncated.warnings.empty());

  const SequenceVector xi2{{random_function(gen, 2, 1)}};
  const SequenceVector eta2{{random_function(gen, 2, 2)}};
  const auto r2 = ket_bra_check(xi2, eta2, 4);
  CHECK(r2.laurent_defect < 1e-12);
  CHECK(r2.rank_one_defect < 1e-12);
}

TEST_CASE("bracket Gram positivity (property)") {
  testgen::Gen gen(173);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<SequenceVector> family;
    for (int i = 0; i < 3; ++i) family.push_back(single(random_function(gen, 1, 3)));
    const auto g = bracket_gram_positivity(family, 10);
    CHECK(g.min_eigenvalue >= -1e-10 * g.norm);
  }
}

TEST_CASE("Fourier coefficients") {
  const auto wave = fourier_coefficients([](const std::vector<double>& x) { return std::polar(1.0, 2 * kPi * 2 * x[0]); },
                                         1, 4, 64);
  for (std::int64_t nu = -4; nu <= 4; ++nu) CHECK(std::abs(wave.at({nu}) - Complex(nu == 2 ? 1.0 : 0.0)) < 1e-13);

  const auto ind = indicator_coefficients(0.2, 0.6, 5);
  // Midpoint rule with 200000 nodes on [0.2, 0.6].
  for (std::int64_t nu = -5; nu <= 5; ++nu) {
    const int n = 200000;
    const double h = 0.4 / n;
    Complex s = 0.0;
    for (int i = 0; i < n; ++i) s += std::polar(1.0, -2 * kPi * static_cast<double>(nu) * (0.2 + (i + 0.5) * h));
    CHECK(std::abs(ind.at({nu}) - s * h) < 1e-8);
  }
}

TEST_CASE("bracket l1 norms of indicator generators grow slowly") {
  const std::vector<std::function<SequenceVector(int)>> gens{
      [](int r) { return single(indicator_coefficients(0.2, 0.6, r)); }};
  const auto rows = rel_l1_report(gens, {8, 16, 32, 64});
  REQUIRE(rows.size() == 4);
  std::vector<double> inc;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].norms[0] > rows[i - 1].norms[0]);
    inc.push_back(rows[i].norms[0] - rows[i - 1].norms[0]);
  }
  // Doubling the radius adds a roughly constant amount: logarithmic growth.
  for (std::size_t i = 1; i < inc.size(); ++i) CHECK(std::abs(inc[i] - inc[0]) < 0.2 * inc[0]);
}

TEST_CASE("masks") {
  const auto full = parse_mask("full", 2, 64);
  CHECK(full.contains({0.5, 0.5}));
  const auto disk = parse_mask("disk:0.2", 2, 64);
  CHECK(disk.contains({0.0, 0.0}));
  CHECK_FALSE(disk.contains({0.5, 0.5}));
  CHECK_FALSE(disk.contains({0.5, 0.69}));
  CHECK(disk.contains({0.5, 0.71}));
  CHECK(std::abs(disk.distance_to_complement({0.5, 0.9}) - 0.2) < 1e-12);
  const auto strip = parse_mask("strip:0.4,0.6", 2, 64);
  CHECK(strip.contains({0.1, 0.5}));
  CHECK_FALSE(strip.contains({0.5, 0.1}));
  CHECK_THROWS_AS(parse_mask("disk:0.7", 2, 64), std::invalid_argument);
  CHECK_THROWS_AS(parse_mask("bogus", 2, 64), std::invalid_argument);

  const std::string path = "twistfix_test_mask.txt";
  {
    std::ofstream out(path);
    for (int r = 0; r < 16; ++r) out << (r < 8 ? "1111111100000000" : "0000000000000000") << "\n";
  }
  const auto bitmap = parse_mask("bitmap:" + path, 2, 16);
  CHECK(bitmap.contains({0.1, 0.1}));
  CHECK_FALSE(bitmap.contains({0.8, 0.8}));
  {
    std::ofstream out(path);
    for (int r = 0; r < 16; ++r) out << "0000000000000000\n";
  }
  CHECK_THROWS_AS(parse_mask("bitmap:" + path, 2, 16), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("bumps") {
  const Bump b{{0.5, 0.5}, 0.1};
  CHECK(bump_value(b, {0.5, 0.5}) == doctest::Approx(std::exp(-1.0)));
  CHECK(bump_value(b, {0.5, 0.61}) == 0.0);
  const Bump wrap{{0.0, 0.0}, 0.1};
  CHECK(bump_value(wrap, {0.98, 0.0}) > 0.0);
  const auto bumps = place_bumps(parse_mask("full", 2, 64), 12);
  CHECK(bumps.size() == 16);
  for (const auto& x : bumps) CHECK(x.radius == doctest::Approx(0.9 / 4));
}

TEST_CASE("subset example") {
  const auto disk = parse_mask("disk:0.2", 2, 64);
  const auto r = example_subset(disk, 64, 12);
  CHECK(r.off_support_max == 0.0);
  CHECK(r.commutator_max < 1e-12);
  CHECK(r.tested_pairs > 0);
  CHECK(r.separated_pairs == r.tested_pairs);
  CHECK(r.complement_tested > 0);
  CHECK(r.complement_separated == 0);

  const auto full = example_subset(parse_mask("full", 2, 64), 64, 12);
  CHECK(full.saturated);
  CHECK(full.coverage_min > 0.0);

  SUBCASE("smaller subsets give inner products supported in the larger subset") {
    const auto inner = parse_mask("disk:0.3", 2, 64);
    const auto ips = subset_inner_products(inner, 64, 12);
    double outside = 0.0;
    for (int a = 0; a < 64; ++a) {
      for (int b = 0; b < 64; ++b) {
        if (disk.contains({a / 64.0, b / 64.0})) continue;
        for (const auto& ip : ips) outside = std::max(outside, std::abs(ip[static_cast<std::size_t>(a * 64 + b)]));
      }
    }
    CHECK(outside == 0.0);
  }
}

TEST_CASE("clutching bundles") {
  for (int m = -2; m <= 3; ++m) {
    const auto bundle = ClutchingBundle::make(m, 64);
    CHECK(chern_number(bundle) == m);
    const auto sections = clutching_sections(m, 64);
    CHECK(sections.seam_defect < 1e-12);
    CHECK(sections.min_gram_eigenvalue > 0.1);
    const auto report = fixedpoint_bundle_report(bundle, sections);
    CHECK(report.min_fiber_dim == 4);
    CHECK(report.chern == m);
  }
  CHECK_THROWS_AS(clutching_sections(1, 64, 1), RankDeficient);
  CHECK_THROWS_AS(clutching_sections(1, 8), std::invalid_argument);
  CHECK_THROWS_AS(chern_number(ClutchingBundle::make(10, 16)), ResolutionError);

  SUBCASE("collinear sections do not fill the fiber") {
    const auto bundle = ClutchingBundle::make(0, 16);
    SectionFamily fam;
    fam.m = 0;
    fam.grid = 16;
    const std::size_t points = 16 * 17;
    fam.sections.assign(2, std::vector<Eigen::Vector2cd>(points, Eigen::Vector2cd(1.0, 0.0)));
    for (auto& v : fam.sections[1]) v *= 2.0;
    CHECK_THROWS_AS(fixedpoint_bundle_report(bundle, fam), NotFull);
  }
}
