#pragma once

#include "twistfix/cocycle.hpp"
#include "twistfix/group.hpp"
#include "twistfix/matrix_algebra.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twistfix {

/// Tolerance for algebraic identities evaluated in floating point.
inline constexpr double kAlgebraTol = 1e-12;

/// A finite-dimensional *-subalgebra of M_d presented by a spanning basis of concrete matrices.
/// Elements are handled as d x d matrices; coordinates are taken with respect to the basis.
class StarAlgebra {
 public:
  /// Checks that the span is closed under products and adjoints (InconsistentAlgebra otherwise)
  /// and that the basis is linearly independent (std::invalid_argument otherwise).
  /// `generators` generate the algebra; they default to the basis.
  static StarAlgebra from_basis(std::vector<Matrix> basis, std::vector<Matrix> generators = {});
  /// M_{d_1} + ... + M_{d_r} block diagonally, basis of matrix units in block order, row-major.
  static StarAlgebra matrix_blocks(const std::vector<int>& sizes);
  /// C[G, omega] through its left regular representation; basis element t is lambda_omega(delta_t).
  static StarAlgebra twisted_group_algebra(const Cocycle& omega);

  std::size_t dim() const noexcept { return basis_.size(); }
  Eigen::Index rep_dim() const noexcept { return basis_.empty() ? 0 : basis_.front().rows(); }
  const std::vector<Matrix>& basis() const noexcept { return basis_; }
  const std::vector<Matrix>& generators() const noexcept { return generators_; }

  /// Coordinates of x by orthogonal projection onto the span.
  Vector coords(const Matrix& x) const;
  Matrix element(const Vector& c) const;
  /// Distance from x to the span (Frobenius norm).
  double distance(const Matrix& x) const;
  bool is_unital() const;

 private:
  StarAlgebra(std::vector<Matrix> basis, std::vector<Matrix> generators);

  std::vector<Matrix> basis_;
  std::vector<Matrix> generators_;
  Eigen::LDLT<Eigen::MatrixXcd> gram_;
};

/// Unitaries U_s on C^D and a representation pi of the algebra (images of the basis) with
/// U_s pi(a) U_s^* = pi(alpha_s(a)); together they represent A x| G.
struct CovariantPair {
  std::vector<Matrix> pi_basis;
  std::vector<Matrix> unitaries;
};

/// (A, G, alpha): each alpha_s is stored as its coordinate matrix on the algebra basis.
class GAlgebra {
 public:
  /// Validates alpha_e = id, alpha_s alpha_t = alpha_{s+t}, multiplicativity and *-preservation
  /// on basis pairs to 1e-12; throws InconsistentAction on failure. A supplied covariant pair is
  /// checked as well; without one the regular covariant representation is used.
  GAlgebra(StarAlgebra algebra, Group group, std::vector<Matrix> action_maps,
           std::optional<CovariantPair> pair = std::nullopt);
  /// Builds every alpha_s from the maps of the cyclic generators e_j.
  static GAlgebra from_generator_maps(StarAlgebra algebra, Group group, const std::vector<Matrix>& generator_maps,
                                      std::optional<CovariantPair> pair = std::nullopt);

  const StarAlgebra& algebra() const noexcept { return algebra_; }
  const Group& group() const noexcept { return group_; }
  const Matrix& action_map(std::size_t s) const { return maps_.at(s); }
  /// alpha_s on a concrete algebra element.
  Matrix act(std::size_t s, const Matrix& a) const;
  const std::optional<CovariantPair>& supplied_pair() const noexcept { return pair_; }

 private:
  StarAlgebra algebra_;
  Group group_;
  std::vector<Matrix> maps_;
  std::optional<CovariantPair> pair_;
};

/// A function G -> A (concrete matrices), an element of L^1(G, A).
using CrossedElement = std::vector<Matrix>;

/// t -> xi^* alpha_t(eta).
CrossedElement bracket(const Matrix& xi, const Matrix& eta, const GAlgebra& act);
/// (f * g)(t) = sum_s f(s) alpha_s(g(t - s)).
CrossedElement crossed_multiply(const CrossedElement& f, const CrossedElement& g, const GAlgebra& act);
/// f^*(t) = alpha_t(f(-t)^*).
CrossedElement crossed_adjoint(const CrossedElement& f, const GAlgebra& act);
/// (i_A(a) f)(t) = a f(t).
CrossedElement left_multiplier(const Matrix& a, const CrossedElement& f);
/// (f i_A(b))(t) = f(t) alpha_t(b).
CrossedElement right_multiplier(const CrossedElement& f, const Matrix& b, const GAlgebra& act);
/// xi * phi = sum_t alpha_t(xi phi(-t)).
Matrix module_action(const Matrix& xi, const CrossedElement& phi, const GAlgebra& act);
double crossed_distance(const CrossedElement& f, const CrossedElement& g);

struct CrossedRep {
  CovariantPair pair;
  Eigen::Index dimension = 0;
  /// dim span{pi(b_i) U_s}; equals dim(A) |G| for a faithful representation.
  std::size_t crossed_dim = 0;
  bool faithful = false;
};

/// The supplied covariant pair, or the regular one on C^d (x) l^2(G):
/// pi(a) xi(r) = alpha_{-r}(a) xi(r), (lambda_s xi)(r) = xi(r - s).
/// Throws InconsistentAction when covariance fails beyond 1e-12.
CrossedRep crossed_rep(const GAlgebra& act);
Matrix represent(const CrossedRep& rep, const GAlgebra& act, const Matrix& a);
Matrix represent(const CrossedRep& rep, const GAlgebra& act, const CrossedElement& f);

struct PairTotal {
  std::size_t i = 0;
  std::size_t j = 0;
  double total = 0.0;
};

struct P1Report {
  std::vector<PairTotal> pairs;
  bool passed = true;
};

/// Finite groups: sum_t ||xi^* alpha_t(eta)|| for every generator pair (always passes).
P1Report p1_check(const std::vector<Matrix>& R, const GAlgebra& act);

/// sum_t alpha_t(xi eta^*), exact finite sum.
Matrix fix_inner(const Matrix& xi, const Matrix& eta, const GAlgebra& act);

/// Orthonormal (Frobenius) basis of span{alpha_s(xi b) : xi in R, b in A, s in G}.
std::vector<Matrix> build_R_tilde(const std::vector<Matrix>& R, const GAlgebra& act);
/// Orthonormal basis of A_0 = span{x y^* : x, y in R~}.
std::vector<Matrix> build_A0(const std::vector<Matrix>& R, const GAlgebra& act);

struct GramReport {
  double min_eigenvalue = 0.0;
  double norm = 0.0;
};
/// Block matrix [rep(bracket(xi_i, xi_j))]_{ij} and its spectrum.
GramReport gram_positivity(const std::vector<Matrix>& R, const GAlgebra& act);

struct SaturationReport {
  bool saturated = false;
  std::size_t ideal_dim = 0;
  std::size_t full_dim = 0;
};
SaturationReport saturation_check(const std::vector<Matrix>& R, const GAlgebra& act);

struct FixedPointReport {
  std::vector<int> blocks;
  std::size_t dimension = 0;
  std::vector<Matrix> generators;
  /// max ||alpha_t(m) - m|| / ||m|| over the generators.
  double fixedness_defect = 0.0;
};
/// Span of fix_inner over R~; checked to be a G-fixed *-algebra (InconsistentAlgebra otherwise).
FixedPointReport fixed_point_algebra(const std::vector<Matrix>& R, const GAlgebra& act, std::uint64_t seed = 1);

struct ModuleEquivalenceReport {
  std::size_t ideal_dim_R = 0;
  std::size_t ideal_dim_R_tilde = 0;
  std::size_t ideal_dim_A0 = 0;
  /// Max defect of the two module identities on seeded random data.
  double formula_defect = 0.0;
  bool equivalent = false;
};
ModuleEquivalenceReport module_equivalence_check(const std::vector<Matrix>& R, const GAlgebra& act,
                                                 std::uint64_t seed = 1);

/// max over generator triples of ||fix_inner(xi, eta) zeta - xi * bracket(eta, zeta)||.
double imprimitivity_check(const std::vector<Matrix>& R, const GAlgebra& act);

/// Phi maps A-coordinates to B-coordinates. Checks that Phi is multiplicative, *-preserving,
/// equivariant and nondegenerate (span Phi(A) B = B); throws std::invalid_argument otherwise.
/// Returns the spanning set {Phi(xi) b}.
std::vector<Matrix> induce_via_morphism(const Matrix& phi, const GAlgebra& a, const GAlgebra& b,
                                        const std::vector<Matrix>& R_A);

/// (A (x) B, G x H, alpha (x) beta) with basis kron(a_i, b_j) in row-major order.
GAlgebra tensor_action(const GAlgebra& a, const GAlgebra& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// alpha_g := alpha~_{q(g)} for the quotient map q: G -> G/N given by element indices.
/// Throws std::invalid_argument unless q is a surjective homomorphism.
GAlgebra inflate_action(const GAlgebra& quotient_action, const Group& g, const std::vector<std::size_t>& q);

/// Quotient map Z_{n_1} x ... -> Z_{m_1} x ... reducing each coordinate mod m_j (m_j | n_j).
std::vector<std::size_t> reduction_map(const Group& g, const Group& quotient);

/// Coefficientwise shifts on a sequence algebra over Z^k: alpha_t(a)(m) = a(m - t).
/// Generators are given as functions of m; the observation box is |m|_inf <= max window.
struct ShiftModel {
  int rank = 1;
  std::vector<std::function<Complex(const Element&)>> generators;
};

struct LatticePairTails {
  std::size_t i = 0;
  std::size_t j = 0;
  /// sum_{|t| <= R} ||xi^* alpha_t(eta)|| per window R.
  std::vector<double> totals;
  /// sum_{R < |t| <= 2 R_max} ||xi^* alpha_t(eta)|| per window R.
  std::vector<double> tails;
  bool passed = false;
  bool monotone = true;
};

struct LatticeP1Report {
  std::vector<int> windows;
  std::vector<LatticePairTails> pairs;
  bool passed = false;
  std::vector<std::string> warnings;
};

std::vector<int> default_windows();
LatticeP1Report p1_check(const ShiftModel& model, const std::vector<int>& windows, double tol);

struct LatticeFixInner {
  int radius = 0;
  /// Samples of sum_{|t| <= R_max} alpha_t(xi eta^*) on the observation box, index order of
  /// Group::lattice(rank, R_max).
  std::vector<Complex> values;
  /// max_b sup_m |b(m)|^2 |S_K'(m) - S_K(m)| for the last pair of consecutive windows.
  double monitor = 0.0;
};

/// Strict-convergence monitor on the generating set; throws NotStrictlyConvergent naming b.
LatticeFixInner fix_inner(const ShiftModel& model, std::size_t i, std::size_t j, const std::vector<int>& windows,
                          double tol);

}  // namespace twistfix
