#pragma once

#include "twistfix/cocycle.hpp"
#include "twistfix/group.hpp"
#include "twistfix/matrix_algebra.hpp"

#include <cstddef>
#include <vector>

namespace twistfix {

/// A function G -> C, stored densely in index order (the algebra C[G, omega] as a vector space).
class TwistedElement {
 public:
  explicit TwistedElement(Group g);
  TwistedElement(Group g, std::vector<Complex> coeffs);
  static TwistedElement delta(const Group& g, std::size_t s, Complex c = 1.0);

  const Group& group() const noexcept { return group_; }
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  Complex operator[](std::size_t s) const { return coeffs_[s]; }
  Complex& operator[](std::size_t s) { return coeffs_[s]; }
  /// Indices with nonzero coefficient.
  std::vector<std::size_t> support() const;

  TwistedElement operator+(const TwistedElement& o) const;
  TwistedElement operator-(const TwistedElement& o) const;
  TwistedElement operator*(Complex c) const;
  double max_abs() const;

 private:
  Group group_;
  std::vector<Complex> coeffs_;
};

/// c * delta_s with c an exact phase; closed under convolution and involution.
struct PointMass {
  std::size_t element = 0;
  Phase phase;
  friend bool operator==(const PointMass&, const PointMass&) = default;
};

/// (f *_omega g)(t) = sum_s f(s) g(t - s) omega(s, t - s).
TwistedElement convolve(const TwistedElement& f, const TwistedElement& g, const Cocycle& omega);
PointMass convolve(const PointMass& f, const PointMass& g, const Cocycle& omega);

/// f*(s) = conj(omega(s, -s) f(-s)).
TwistedElement involute(const TwistedElement& f, const Cocycle& omega);
PointMass involute(const PointMass& f, const Cocycle& omega);

/// A generalized permutation matrix with exact phase entries: column j has the single
/// entry phases[j] in row rows[j]. Products and equality are exact.
class MonomialOperator {
 public:
  MonomialOperator(std::vector<std::size_t> rows, std::vector<Phase> phases);
  static MonomialOperator identity(std::size_t n);

  std::size_t dimension() const noexcept { return rows_.size(); }
  std::size_t row_of(std::size_t col) const { return rows_[col]; }
  const Phase& phase_of(std::size_t col) const { return phases_[col]; }

  MonomialOperator operator*(const MonomialOperator& o) const;
  MonomialOperator adjoint() const;
  Matrix to_matrix() const;
  friend bool operator==(const MonomialOperator&, const MonomialOperator&) = default;

 private:
  std::vector<std::size_t> rows_;
  std::vector<Phase> phases_;
};

/// lambda_omega(delta_t): (xi)(r) -> omega(t, r - t) xi(r - t), exactly.
MonomialOperator left_regular_point(std::size_t t, const Cocycle& omega);
/// rho_omega(s): (xi)(r) -> omega(r - s, s) xi(r - s), exactly.
MonomialOperator right_regular(std::size_t s, const Cocycle& omega);

/// Matrix of xi -> f *_omega xi on l^2(G), rows and columns indexed by group elements.
Matrix left_regular(const TwistedElement& f, const Cocycle& omega);

/// Pointwise multiplication by the character chi (identified with a group element via dual_pair).
TwistedElement dual_act(std::size_t chi, const TwistedElement& f);

struct Decomposition {
  std::vector<int> blocks;
  std::size_t center_dim = 0;
};

/// Wedderburn blocks of C[G, omega] in its left regular representation.
Decomposition decompose(const Cocycle& omega, std::uint64_t seed = 1);

struct FixedPoints {
  std::size_t dimension = 0;
  std::vector<TwistedElement> basis;
};

/// {f : chi . f = f for all chi}, computed as the common kernel of (chi(s) - 1) f(s).
FixedPoints classical_fixed_points(const Cocycle& omega);

}  // namespace twistfix
