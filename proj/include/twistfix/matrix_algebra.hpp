#pragma once

#include "twistfix/phase.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace twistfix {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default tolerance for rank decisions.
inline constexpr double kRankTol = 1e-8;

/// Numerical rank with relative threshold tol * sigma_max. Singular values inside the band
/// (tol * 1e-3, tol * 1e3) * sigma_max make the decision ambiguous and raise IllConditioned.
std::size_t numerical_rank(const Matrix& a, double tol = kRankTol);

/// Orthonormal basis (columns) of ker a, with the same ambiguity rule as numerical_rank.
/// Singular values are measured against max(sigma_max, scale), so a matrix that vanishes up to
/// rounding relative to `scale` has full kernel.
Matrix nullspace(const Matrix& a, double tol = kRankTol, double scale = 0.0);

/// Column-stacked copy of a matrix.
Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Incremental orthonormal basis of a span (modified Gram-Schmidt with one reorthogonalization).
class SpanBuilder {
 public:
  explicit SpanBuilder(Eigen::Index length, double tol = kRankTol) : length_(length), tol_(tol) {}

  /// Adds v when its component orthogonal to the current span exceeds tol * max(|v|, scale).
  /// Returns true when the dimension grew.
  bool add(const Vector& v);
  bool contains(const Vector& v) const;
  /// Orthogonal residual of v against the span.
  Vector residual(const Vector& v) const;

  std::size_t dimension() const noexcept { return basis_.size(); }
  const std::vector<Vector>& basis() const noexcept { return basis_; }
  Eigen::Index length() const noexcept { return length_; }

 private:
  Eigen::Index length_;
  double tol_;
  double scale_ = 0.0;
  std::vector<Vector> basis_;
};

/// Dimension of span of the given matrices.
std::size_t span_dimension(const std::vector<Matrix>& mats, double tol = kRankTol);

/// Two-sided ideal generated by `seeds` inside the algebra generated by `generators`:
/// the smallest subspace containing the seeds that is closed under left and right
/// multiplication by every generator. Returns an orthonormal basis (flattened).
/// When max_dim > 0 the closure stops as soon as that dimension is reached (the caller knows
/// the dimension of the ambient algebra).
std::vector<Vector> ideal_closure(const std::vector<Matrix>& seeds, const std::vector<Matrix>& generators,
                                  double tol = kRankTol, std::size_t max_dim = 0);

struct WedderburnResult {
  /// Block sizes d_j, sorted in descending order; sum d_j^2 equals the algebra dimension.
  std::vector<int> blocks;
  std::size_t center_dim = 0;
  std::size_t algebra_dim = 0;
};

/// Wedderburn decomposition of a finite-dimensional *-subalgebra of M_d.
///
/// `basis` spans the algebra and `generators` generate it as an algebra. The center is the
/// common commutant of the generators inside the span. A random Hermitian central element
/// (seeded) splits the algebra by its eigenvalue clusters (radius 1e-6); block j has
/// d_j^2 = dim span{P_j b P_j}. When clusters merge by accident the check
/// "#blocks = dim center, every d_j^2 a square" fails and a new seed is tried.
/// Throws IllConditioned when no seed gives a consistent split.
WedderburnResult wedderburn_blocks(const std::vector<Matrix>& basis, const std::vector<Matrix>& generators,
                                   std::uint64_t seed = 1, double tol = kRankTol);

/// Largest singular value.
double operator_norm(const Matrix& m);

}  // namespace twistfix
