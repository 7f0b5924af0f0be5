#include "twistfix/twisted_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twistfix {

TwistedElement::TwistedElement(Group g) : group_(std::move(g)), coeffs_(group_.size(), Complex(0.0)) {}

TwistedElement::TwistedElement(Group g, std::vector<Complex> coeffs) : group_(std::move(g)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != group_.size()) throw std::invalid_argument("twisted element needs one coefficient per group element");
}

TwistedElement TwistedElement::delta(const Group& g, std::size_t s, Complex c) {
  TwistedElement f(g);
  f.coeffs_.at(s) = c;
  return f;
}

std::vector<std::size_t> TwistedElement::support() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < coeffs_.size(); ++s) {
    if (coeffs_[s] != Complex(0.0)) out.push_back(s);
  }
  return out;
}

TwistedElement TwistedElement::operator+(const TwistedElement& o) const {
  require_same_group(group_, o.group_, "twisted element sum");
  auto out = *this;
  for (std::size_t s = 0; s < coeffs_.size(); ++s) out.coeffs_[s] += o.coeffs_[s];
  return out;
}

TwistedElement TwistedElement::operator-(const TwistedElement& o) const { return *this + o * Complex(-1.0); }

TwistedElement TwistedElement::operator*(Complex c) const {
  auto out = *this;
  for (auto& v : out.coeffs_) v *= c;
  return out;
}

double TwistedElement::max_abs() const {
  double m = 0.0;
  for (const auto& v : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

TwistedElement convolve(const TwistedElement& f, const TwistedElement& g, const Cocycle& omega) {
  const auto& grp = omega.group();
  require_same_group(grp, f.group(), "convolve");
  require_same_group(grp, g.group(), "convolve");
  TwistedElement out(grp);
  const auto fs = f.support();
  const auto gs = g.support();
  for (auto s : fs) {
    for (auto u : gs) out[grp.add(s, u)] += f[s] * g[u] * omega.value(s, u);
  }
  return out;
}

PointMass convolve(const PointMass& f, const PointMass& g, const Cocycle& omega) {
  return {omega.group().add(f.element, g.element), f.phase * g.phase * omega(f.element, g.element)};
}

TwistedElement involute(const TwistedElement& f, const Cocycle& omega) {
  const auto& grp = omega.group();
  require_same_group(grp, f.group(), "involute");
  TwistedElement out(grp);
  for (std::size_t s = 0; s < grp.size(); ++s) {
    const auto ms = grp.neg(s);
    out[s] = std::conj(omega.value(s, ms) * f[ms]);
  }
  return out;
}

PointMass involute(const PointMass& f, const Cocycle& omega) {
  // (c delta_s)* = conj(c) conj(omega(-s, s)) delta_{-s}
  const auto& grp = omega.group();
  const auto ms = grp.neg(f.element);
  return {ms, (omega(ms, f.element) * f.phase).conj()};
}

MonomialOperator::MonomialOperator(std::vector<std::size_t> rows, std::vector<Phase> phases)
    : rows_(std::move(rows)), phases_(std::move(phases)) {
  if (rows_.size() != phases_.size()) throw std::invalid_argument("monomial operator shape mismatch");
}

MonomialOperator MonomialOperator::identity(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return MonomialOperator(std::move(rows), std::vector<Phase>(n));
}

MonomialOperator MonomialOperator::operator*(const MonomialOperator& o) const {
  if (dimension() != o.dimension()) throw std::invalid_argument("monomial operator dimension mismatch");
  std::vector<std::size_t> rows(dimension());
  std::vector<Phase> phases(dimension());
  for (std::size_t j = 0; j < dimension(); ++j) {
    const auto mid = o.rows_[j];
    rows[j] = rows_[mid];
    phases[j] = phases_[mid] * o.phases_[j];
  }
  return MonomialOperator(std::move(rows), std::move(phases));
}

MonomialOperator MonomialOperator::adjoint() const {
  std::vector<std::size_t> rows(dimension());
  std::vector<Phase> phases(dimension());
  for (std::size_t j = 0; j < dimension(); ++j) {
    rows[rows_[j]] = j;
    phases[rows_[j]] = phases_[j].conj();
  }
  return MonomialOperator(std::move(rows), std::move(phases));
}

Matrix MonomialOperator::to_matrix() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < dimension(); ++j) {
    m(static_cast<Eigen::Index>(rows_[j]), static_cast<Eigen::Index>(j)) = phases_[j].value();
  }
  return m;
}

MonomialOperator left_regular_point(std::size_t t, const Cocycle& omega) {
  const auto& grp = omega.group();
  std::vector<std::size_t> rows(grp.size());
  std::vector<Phase> phases(grp.size());
  for (std::size_t j = 0; j < grp.size(); ++j) {
    rows[j] = grp.add(t, j);
    phases[j] = omega(t, j);
  }
  return MonomialOperator(std::move(rows), std::move(phases));
}

MonomialOperator right_regular(std::size_t s, const Cocycle& omega) {
  const auto& grp = omega.group();
  std::vector<std::size_t> rows(grp.size());
  std::vector<Phase> phases(grp.size());
  for (std::size_t j = 0; j < grp.size(); ++j) {
    rows[j] = grp.add(j, s);
    phases[j] = omega(j, s);
  }
  return MonomialOperator(std::move(rows), std::move(phases));
}

Matrix left_regular(const TwistedElement& f, const Cocycle& omega) {
  const auto& grp = omega.group();
  require_same_group(grp, f.group(), "left_regular");
  const auto n = static_cast<Eigen::Index>(grp.size());
  Matrix m = Matrix::Zero(n, n);
  for (auto t : f.support()) {
    for (std::size_t j = 0; j < grp.size(); ++j) {
      m(static_cast<Eigen::Index>(grp.add(t, j)), static_cast<Eigen::Index>(j)) += f[t] * omega.value(t, j);
    }
  }
  return m;
}

TwistedElement dual_act(std::size_t chi, const TwistedElement& f) {
  const auto& grp = f.group();
  auto out = f;
  for (std::size_t s = 0; s < grp.size(); ++s) out[s] *= grp.dual_pair(s, chi).value();
  return out;
}

Decomposition decompose(const Cocycle& omega, std::uint64_t seed) {
  const auto& grp = omega.group();
  std::vector<Matrix> basis;
  basis.reserve(grp.size());
  for (std::size_t t = 0; t < grp.size(); ++t) basis.push_back(left_regular_point(t, omega).to_matrix());
  std::vector<Matrix> generators;
  for (std::size_t j = 0; j < grp.rank(); ++j) generators.push_back(basis[grp.generator(j)]);
  const auto w = wedderburn_blocks(basis, generators, seed);
  return {w.blocks, w.center_dim};
}

FixedPoints classical_fixed_points(const Cocycle& omega) {
  const auto& grp = omega.group();
  const auto n = static_cast<Eigen::Index>(grp.size());
  // The dual action is diagonal in the delta basis: f is fixed iff (chi(s) - 1) f(s) = 0.
  Matrix constraints = Matrix::Zero(n * n, n);
  for (std::size_t chi = 0; chi < grp.size(); ++chi) {
    for (std::size_t s = 0; s < grp.size(); ++s) {
      constraints(static_cast<Eigen::Index>(chi) * n + static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) =
          grp.dual_pair(s, chi).value() - 1.0;
    }
  }
  const Matrix ker = nullspace(constraints);
  FixedPoints out;
  out.dimension = static_cast<std::size_t>(ker.cols());
  for (Eigen::Index j = 0; j < ker.cols(); ++j) {
    std::vector<Complex> c(grp.size());
    for (Eigen::Index i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = ker(i, j);
    out.basis.emplace_back(grp, std::move(c));
  }
  return out;
}

}  // namespace twistfix
