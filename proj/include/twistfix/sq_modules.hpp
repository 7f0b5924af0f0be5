#pragma once

#include "twistfix/group.hpp"
#include "twistfix/matrix_algebra.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace twistfix {

/// A sequence on Z^k supported in the window {-R..R}^k, stored in the index order of
/// Group::lattice(k, R). Values outside the window are zero.
class LatticeFunction {
 public:
  LatticeFunction(int k, int radius);
  static LatticeFunction delta(int k, int radius, const Element& at, Complex c = 1.0);

  int rank() const noexcept { return k_; }
  int radius() const noexcept { return radius_; }
  const Group& window() const noexcept { return window_; }
  std::size_t size() const noexcept { return values_.size(); }
  Complex at(const Element& m) const;
  Complex& operator[](std::size_t idx) { return values_[idx]; }
  Complex operator[](std::size_t idx) const { return values_[idx]; }
  const std::vector<Complex>& values() const noexcept { return values_; }
  double l1_norm() const;
  double l2_norm() const;

 private:
  int k_;
  int radius_;
  Group window_;
  std::vector<Complex> values_;
};

/// n window-supported components (an element of l^2(Z^k)^n).
struct SequenceVector {
  std::vector<LatticeFunction> components;
  int rank() const { return components.front().rank(); }
  int radius() const { return components.front().radius(); }
};

SequenceVector single(const LatticeFunction& f);

/// (lambda_phi)_{t,s} = phi(t - s) for t, s in the window {-W..W}^k.
Matrix laurent_operator(const LatticeFunction& phi, int window);

/// m -> sum_i sum_nu conj(xi_i(nu)) eta_i(nu + m), supported in radius R_xi + R_eta.
LatticeFunction bracket_symbol(const SequenceVector& xi, const SequenceVector& eta);

/// (rho_t xi)(nu) = xi(nu + t), kept on a window of radius R + |t|_inf.
LatticeFunction right_translate(const LatticeFunction& f, const Element& t);

/// Torus transform f^(z) = sum_nu f(nu) z^nu at z_a = exp(2 pi i a / M), a in {0..M-1}^k
/// (row-major), evaluated directly. Requires M >= 2R + 1 so that sampling is injective.
std::vector<Complex> torus_transform(const LatticeFunction& f, int M);

/// |xi>> f(nu) = sum_t xi(nu - t) f(t): columns t in {-W..W}^k, rows (component i, nu) with nu
/// in {-W_mod..W_mod}^k.
Matrix ket_operator(const SequenceVector& xi, int window, int module_window);
/// <<xi| zeta(t) = sum_nu conj(xi(nu - t)) zeta(nu): the adjoint of ket_operator.
Matrix bra_operator(const SequenceVector& xi, int window, int module_window);

struct KetBraReport {
  int window = 0;
  int module_window = 0;
  /// max entry of <<xi| |eta>> - Laurent(bracket_symbol(xi, eta)) on the window.
  double laurent_defect = 0.0;
  /// max entry of |xi>><<eta| - sum_{|t| <= W} rho_t |xi><eta| rho_t^* on the module window.
  double rank_one_defect = 0.0;
  std::vector<std::string> warnings;
};

/// Compares both identities. module_window < 0 picks W + max support radius, which makes the
/// first identity exact; smaller module windows truncate and raise a warning.
KetBraReport ket_bra_check(const SequenceVector& xi, const SequenceVector& eta, int window, int module_window = -1);

/// Minimum eigenvalue of the block Laurent matrix [Laurent(bracket_symbol(xi_i, xi_j))]_{ij}.
struct BracketGram {
  double min_eigenvalue = 0.0;
  double norm = 0.0;
};
BracketGram bracket_gram_positivity(const std::vector<SequenceVector>& family, int window);

/// Fourier coefficients xi(nu) = int_{T^k} F(x) exp(-2 pi i <nu, x>) dx for |nu| <= R, by
/// trapezoidal quadrature on a Q^k grid.
using TorusFunction = std::function<Complex(const std::vector<double>&)>;
LatticeFunction fourier_coefficients(const TorusFunction& F, int k, int radius, int quadrature = 512);
/// Closed-form coefficients of the indicator of [a, b] in [0, 1) (k = 1).
LatticeFunction indicator_coefficients(double a, double b, int radius);

struct RelL1Row {
  int radius = 0;
  /// ||bracket_symbol(xi_i, xi_j)||_1 in row-major pair order.
  std::vector<double> norms;
};
/// Bracket l^1 norms of generator families truncated at each radius of the schedule.
std::vector<RelL1Row> rel_l1_report(const std::vector<std::function<SequenceVector(int)>>& generators,
                                    const std::vector<int>& radii);

/// An open subset S of T^k = [0,1)^k given by membership and distance to its complement.
struct TorusMask {
  std::string name;
  int k = 2;
  std::function<bool(const std::vector<double>&)> contains;
  /// Torus distance to T^k \ S (infinity for the full torus).
  std::function<double(const std::vector<double>&)> distance_to_complement;
};

/// "full", "disk:r" (complement of the closed disk of radius r about the centre point),
/// "strip:a,b" (complement of the closed strip a <= x_1 <= b), or "bitmap:<path>" (M lines
/// of M characters, '1' marking cells in S). Throws std::invalid_argument when S has no
/// interior at grid scale.
TorusMask parse_mask(std::string_view spec, int k, int grid);

struct Bump {
  std::vector<double> centre;
  double radius = 0.0;
};

/// exp(-1 / (1 - |x - c|^2 / r^2)) inside the ball (periodic distance), 0 outside.
double bump_value(const Bump& b, const std::vector<double>& x);

/// Bumps on a lattice of m = ceil(count^(1/k)) centres per axis, each with radius
/// min(0.9 / m, 0.95 dist(c, complement)); centres outside S are skipped.
std::vector<Bump> place_bumps(const TorusMask& mask, int count);

struct SubsetReport {
  std::string mask;
  int k = 2;
  int grid = 0;
  std::size_t bumps = 0;
  std::size_t inner_products = 0;
  /// max |conj(xi^) eta^| at grid points outside S.
  double off_support_max = 0.0;
  /// max relative commutator norm among the fixed-point operators on probe vectors.
  double commutator_max = 0.0;
  /// Sampled pairs of covered points of S that the inner products separate, out of tested.
  std::size_t separated_pairs = 0;
  std::size_t tested_pairs = 0;
  /// Sampled pairs of points outside S that are separated (must be 0).
  std::size_t complement_separated = 0;
  std::size_t complement_tested = 0;
  /// min over the grid of sum_i |xi_i^|^2; positive everywhere means saturated.
  double coverage_min = 0.0;
  bool saturated = false;
  std::uint64_t seed = 0;
};

SubsetReport example_subset(const TorusMask& mask, int grid, int bump_count, std::uint64_t seed = 1);

/// Inner-product functions conj(xi_i^) xi_j^ sampled on the grid (for span comparisons).
std::vector<std::vector<Complex>> subset_inner_products(const TorusMask& mask, int grid, int bump_count);

/// The clutching description of V_m = C + L_m over T^2 = circle x [0, 1] / gluing:
/// (z, 0, v) ~ (z, 1, diag(1, z^m) v).
struct ClutchingBundle {
  int m = 0;
  int grid = 0;
  /// Transition matrices diag(1, z^m) at z_a = exp(2 pi i a / grid).
  std::vector<Eigen::Matrix2cd> transition;
  static ClutchingBundle make(int m, int grid);
};

/// Section samples at (x_a, s_b) = (a / M, b / M), a in 0..M-1, b in 0..M (both seam copies).
struct SectionFamily {
  int m = 0;
  int grid = 0;
  std::vector<std::vector<Eigen::Vector2cd>> sections;
  double seam_defect = 0.0;
  double min_gram_eigenvalue = 0.0;
  std::size_t index(int a, int b) const { return static_cast<std::size_t>(b) * static_cast<std::size_t>(grid) + static_cast<std::size_t>(a); }
};

/// e1 = (1, 0), e2 = (0, beta), e3 = (0, h z^{-m} for s < 1/2 and h for s >= 1/2), e4 = (beta, beta),
/// then (beta e^{2 pi i j x}, beta e^{-2 pi i j x}) for j = 1, 2, ...; beta = sin(theta(s)),
/// h = cos(theta(s)) with theta a smooth step from 0 near the seam to pi/2 in the middle.
/// Requires grid >= 16. Throws RankDeficient naming the first grid point whose fiber Gram is
/// singular.
SectionFamily clutching_sections(int m, int grid, int count = 4);

/// Winding number of det(transition) by summed wrapped phase increments. Throws
/// ResolutionError when an increment exceeds 0.75 pi or grid < 8 |winding|.
int chern_number(const ClutchingBundle& bundle);

struct BundleReport {
  int m = 0;
  int grid = 0;
  int chern = 0;
  std::size_t min_fiber_dim = 0;
  std::size_t max_fiber_dim = 0;
  double seam_defect = 0.0;
  double min_gram_eigenvalue = 0.0;
};

/// Fiberwise span of {sigma_i sigma_j^*}; throws NotFull naming the first point where it is
/// not all of M_2.
BundleReport fixedpoint_bundle_report(const ClutchingBundle& bundle, const SectionFamily& sections);

}  // namespace twistfix
