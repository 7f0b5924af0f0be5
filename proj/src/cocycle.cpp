#include "twistfix/cocycle.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace twistfix {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const auto r = a % n;
  return r < 0 ? r + n : r;
}

void require_finite(const Group& g) {
  if (g.is_lattice()) throw std::invalid_argument("cocycles are defined on finite groups only");
}

}  // namespace

Cocycle::Cocycle(Group g, std::int64_t den, std::vector<std::int64_t> num, std::optional<RationalMatrix> m)
    : group_(std::move(g)), den_(den), num_(std::move(num)), matrix_(std::move(m)) {}

Cocycle Cocycle::from_matrix(const Group& g, const RationalMatrix& m) {
  require_finite(g);
  const auto k = g.rank();
  if (m.size() != k) throw std::invalid_argument("bicharacter matrix must be " + std::to_string(k) + "x" + std::to_string(k));
  std::int64_t den = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (m[i].size() != k) throw std::invalid_argument("bicharacter matrix must be square");
    for (std::size_t j = 0; j < k; ++j) {
      const auto allowed = std::gcd(g.orders()[i], g.orders()[j]);
      if (allowed % m[i][j].denominator() != 0) {
        throw std::invalid_argument("entry M[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                    to_string(m[i][j]) + " has a denominator not dividing gcd(n_i, n_j) = " +
                                    std::to_string(allowed));
      }
      den = std::lcm(den, m[i][j].denominator());
    }
  }
  const auto n = g.size();
  std::vector<std::int64_t> num(n * n);
  std::vector<Element> elems(n);
  for (std::size_t s = 0; s < n; ++s) elems[s] = g.element(s);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      std::int64_t acc = 0;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const auto& q = m[i][j];
          acc += elems[s][i] * elems[t][j] * q.numerator() * (den / q.denominator());
        }
      }
      num[s * n + t] = mod(acc, den);
    }
  }
  return Cocycle(g, den, std::move(num), m);
}

Cocycle Cocycle::from_table(const Group& g, const std::vector<Phase>& table) {
  require_finite(g);
  const auto n = g.size();
  if (table.size() != n * n) {
    throw std::invalid_argument("cocycle table must have |G|^2 = " + std::to_string(n * n) + " entries");
  }
  const auto e = g.identity();
  const Phase scale = table[e * n + e].conj();
  std::int64_t den = 1;
  std::vector<Phase> scaled(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    scaled[i] = table[i] * scale;
    den = std::lcm(den, scaled[i].exponent().denominator());
  }
  std::vector<std::int64_t> num(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& q = scaled[i].exponent();
    num[i] = q.numerator() * (den / q.denominator());
  }
  return Cocycle(g, den, std::move(num), std::nullopt);
}

Cocycle Cocycle::trivial(const Group& g) {
  require_finite(g);
  const auto k = g.rank();
  return from_matrix(g, RationalMatrix(k, std::vector<Rational>(k, Rational(0))));
}

std::vector<Phase> Cocycle::table() const {
  std::vector<Phase> out(num_.size());
  for (std::size_t i = 0; i < num_.size(); ++i) out[i] = Phase(num_[i], den_);
  return out;
}

Cocycle Cocycle::operator*(const Cocycle& other) const {
  require_same_group(group_, other.group_, "cocycle product");
  const auto den = std::lcm(den_, other.den_);
  std::vector<std::int64_t> num(num_.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    num[i] = mod(num_[i] * (den / den_) + other.num_[i] * (den / other.den_), den);
  }
  std::optional<RationalMatrix> m;
  if (matrix_ && other.matrix_) {
    m = *matrix_;
    for (std::size_t i = 0; i < m->size(); ++i) {
      for (std::size_t j = 0; j < m->size(); ++j) (*m)[i][j] += (*other.matrix_)[i][j];
    }
  }
  return Cocycle(group_, den, std::move(num), std::move(m));
}

bool operator==(const Cocycle& a, const Cocycle& b) {
  if (a.group() != b.group()) return false;
  const auto n = a.group().size();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (a(s, t) != b(s, t)) return false;
    }
  }
  return true;
}

CocycleValidation validate(const Cocycle& omega) {
  const auto& g = omega.group();
  const auto n = g.size();
  const auto den = omega.denominator();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto st = g.add(s, t);
      const auto w_st = omega.numerator(s, t);
      for (std::size_t r = 0; r < n; ++r) {
        const auto lhs = w_st + omega.numerator(st, r);
        const auto rhs = omega.numerator(s, g.add(t, r)) + omega.numerator(t, r);
        if (mod(lhs - rhs, den) != 0) return {false, std::array<std::size_t, 3>{s, t, r}};
      }
    }
  }
  return {};
}

Bicharacter::Bicharacter(Group g, std::int64_t den, std::vector<std::int64_t> num)
    : group_(std::move(g)), den_(den), num_(std::move(num)) {}

bool Bicharacter::is_trivial() const {
  for (auto v : num_) {
    if (v != 0) return false;
  }
  return true;
}

bool Bicharacter::is_bicharacter() const {
  const auto n = group_.size();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t r = 0; r < n; ++r) {
        // h(s)(t + r) = h(s)(t) h(s)(r) and h(s + t)(r) = h(s)(r) h(t)(r)
        if (mod(num_[s * n + group_.add(t, r)] - num_[s * n + t] - num_[s * n + r], den_) != 0) return false;
        if (mod(num_[group_.add(s, t) * n + r] - num_[s * n + r] - num_[t * n + r], den_) != 0) return false;
      }
    }
  }
  return true;
}

bool operator==(const Bicharacter& a, const Bicharacter& b) {
  if (a.group_ != b.group_) return false;
  const auto den = std::lcm(a.den_, b.den_);
  for (std::size_t i = 0; i < a.num_.size(); ++i) {
    if (mod(a.num_[i] * (den / a.den_) - b.num_[i] * (den / b.den_), den) != 0) return false;
  }
  return true;
}

Bicharacter antisymmetrize(const Cocycle& omega) {
  const auto n = omega.group().size();
  const auto den = omega.denominator();
  std::vector<std::int64_t> num(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) num[s * n + t] = mod(omega.numerator(s, t) - omega.numerator(t, s), den);
  }
  return Bicharacter(omega.group(), den, std::move(num));
}

std::vector<std::size_t> symmetrizer(const Cocycle& omega) {
  const auto h = antisymmetrize(omega);
  const auto n = omega.group().size();
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < n; ++s) {
    bool central = true;
    for (std::size_t t = 0; t < n && central; ++t) central = h(s, t).is_one();
    if (central) out.push_back(s);
  }
  return out;
}

bool similar(const Cocycle& a, const Cocycle& b) {
  require_same_group(a.group(), b.group(), "similar");
  return antisymmetrize(a) == antisymmetrize(b);
}

Cocycle coboundary(const Group& g, const std::vector<Phase>& c) {
  if (c.size() != g.size()) throw std::invalid_argument("coboundary needs one phase per group element");
  if (!c[g.identity()].is_one()) throw std::invalid_argument("coboundary requires c(e) = 1");
  const auto n = g.size();
  std::vector<Phase> table(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) table[s * n + t] = c[s] * c[t] * c[g.add(s, t)].conj();
  }
  return Cocycle::from_table(g, table);
}

std::optional<std::vector<Phase>> find_similarity(const Cocycle& a, const Cocycle& b) {
  const auto& g = a.group();
  require_same_group(g, b.group(), "find_similarity");
  if (g.size() > 16) throw std::invalid_argument("exhaustive similarity search is limited to |G| <= 16");
  const auto n = g.size();
  const auto k = g.rank();
  // b = a * delta(c)  <=>  r(s,t) := b(s,t) conj(a(s,t)) = c(s) c(t) conj(c(s+t)).
  auto ratio = [&](std::size_t s, std::size_t t) { return b(s, t) * a(s, t).conj(); };

  // c(x + e_j) = c(x) c(e_j) conj(r(x, e_j)); around the cycle of e_j this forces
  // c(e_j)^{n_j} = prod_{i<n_j} r(i e_j, e_j).
  std::vector<std::vector<Phase>> roots(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto gen = g.generator(j);
    const auto nj = g.orders()[j];
    Phase prod;
    std::size_t x = g.identity();
    for (std::int64_t i = 0; i < nj; ++i) {
      prod *= ratio(x, gen);
      x = g.add(x, gen);
    }
    for (std::int64_t i = 0; i < nj; ++i) roots[j].push_back(Phase((prod.exponent() + i) / nj));
  }

  std::vector<std::size_t> choice(k, 0);
  while (true) {
    std::vector<Phase> c(n);
    for (std::size_t x = 0; x < n; ++x) {
      if (x == g.identity()) continue;
      // Predecessor along the last nonzero coordinate; mixed-radix order guarantees it is smaller.
      const auto e = g.element(x);
      std::size_t j = k;
      while (j-- > 0 && e[j] == 0) {
      }
      const auto gen = g.generator(j);
      const auto prev = g.sub(x, gen);
      c[x] = c[prev] * roots[j][choice[j]] * ratio(prev, gen).conj();
    }
    bool ok = true;
    for (std::size_t s = 0; s < n && ok; ++s) {
      for (std::size_t t = 0; t < n && ok; ++t) ok = (c[s] * c[t] * c[g.add(s, t)].conj()) == ratio(s, t);
    }
    if (ok) return c;
    std::size_t j = 0;
    while (j < k && ++choice[j] == roots[j].size()) choice[j++] = 0;
    if (j == k) return std::nullopt;
  }
}

RationalMatrix antisymmetric_part(const Cocycle& omega) {
  if (!omega.matrix()) throw std::invalid_argument("antisymmetric part needs a matrix-form cocycle");
  const auto& m = *omega.matrix();
  RationalMatrix out(m.size(), std::vector<Rational>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = m[i][j] - m[j][i];
  }
  return out;
}

Cocycle standard_cocycle(const Group& g) {
  if (g.rank() < 2) return Cocycle::trivial(g);
  const auto k = g.rank();
  RationalMatrix m(k, std::vector<Rational>(k, Rational(0)));
  m[1][0] = Rational(1, std::gcd(g.orders()[0], g.orders()[1]));
  return Cocycle::from_matrix(g, m);
}

RationalMatrix parse_rational_matrix(std::string_view text) {
  RationalMatrix out;
  std::vector<Rational> row;
  std::string token;
  int depth = 0;
  auto flush = [&] {
    if (!token.empty()) {
      row.push_back(parse_rational(token));
      token.clear();
    }
  };
  for (char ch : text) {
    if (ch == ' ' || ch == '"' || ch == '\n' || ch == '\t') continue;
    if (ch == '[') {
      if (++depth > 2) throw std::invalid_argument("matrix nesting too deep");
      if (depth == 2) row.clear();
    } else if (ch == ']') {
      flush();
      if (depth == 2) out.push_back(row);
      if (--depth < 0) throw std::invalid_argument("unbalanced brackets in matrix");
    } else if (ch == ',') {
      flush();
    } else {
      if (depth != 2) throw std::invalid_argument("matrix entries must sit inside rows");
      token += ch;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced brackets in matrix");
  return out;
}

}  // namespace twistfix
