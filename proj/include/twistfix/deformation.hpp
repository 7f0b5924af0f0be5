#pragma once

#include "twistfix/matrix_algebra.hpp"
#include "twistfix/phase.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace twistfix {

/// Uniform grid x_j = j L / N on the torus [0, L)^n, used as a periodized model of R^n.
struct GridSpec {
  int n = 2;
  int N = 128;
  double L = 16.0;

  std::size_t points() const;
  double spacing() const { return L / N; }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws std::invalid_argument unless 1 <= n <= 2, N >= 2 is a power of two and L > 0.
void validate(const GridSpec& spec);

/// Samples in row-major order (last coordinate fastest).
struct GridFunction {
  GridSpec spec;
  std::vector<Complex> values;
};

/// Fourier samples F[k] ~ f^(k / L) in FFT index order per axis
/// (index i stands for the signed frequency i < N/2 ? i : i - N).
struct Spectrum {
  GridSpec spec;
  std::vector<Complex> values;
};

using Point = std::vector<double>;
using Profile = std::function<Complex(const Point&)>;

/// exp(-pi |x - c|^2 / s^2) with c the grid centre (L/2, ..., L/2), evaluated on the nearest
/// periodic image.
Profile gaussian(double width, const GridSpec& spec);
/// exp(2 pi i <a, x> / L).
Profile plane_wave(const std::vector<int>& a, const GridSpec& spec);
/// "gaussian:<s>", "wave:<a0>[,<a1>]", "const:<c>".
Profile parse_profile(std::string_view text, const GridSpec& spec);

GridFunction sample(const GridSpec& spec, const Profile& f);

/// F[k] = h^n FFT(f)[k], the Riemann sum for f^(u) = int f(s) exp(-2 pi i <s, u>) ds.
Spectrum forward(const GridFunction& f);
/// f_j = L^{-n} sum_k F[k] exp(2 pi i j k / N); inverse of forward.
GridFunction inverse(const Spectrum& s);

/// A real skew-symmetric n x n matrix; the input is replaced by (J - J^T) / 2.
class SkewMatrix {
 public:
  explicit SkewMatrix(std::vector<std::vector<double>> j);
  /// n = 2: [[0, theta], [-theta, 0]]; n = 1: [[0]].
  static SkewMatrix standard(int n, double theta);
  int n() const noexcept { return static_cast<int>(j_.size()); }
  double operator()(int i, int k) const { return j_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]; }
  bool is_zero() const;

 private:
  std::vector<std::vector<double>> j_;
};

/// exp(2 pi i <J a, b> / L^2) for integer frequency vectors a, b.
Complex omega_J(const SkewMatrix& J, const std::vector<int>& a, const std::vector<int>& b, double L);

/// (F *_omega G)(z) = L^{-n} sum_k F[k] G[z - k] omega_J(k / L, (z - k) / L), summed directly
/// over the frequency window; terms with z - k outside the window are dropped, never wrapped.
Spectrum twisted_conv_freq(const Spectrum& F, const Spectrum& G, const SkewMatrix& J);

struct ProductResult {
  GridFunction value;
  /// Spectral energy fraction of the inputs at |k|_inf >= N/4 (the larger of the two).
  double high_frequency_mass = 0.0;
  std::vector<std::string> warnings;
};

/// inverse(twisted_conv_freq(forward f, forward g, J)). Warns when the high-frequency mass
/// exceeds 1e-10.
ProductResult deformed_product(const GridFunction& f, const GridFunction& g, const SkewMatrix& J);

/// Oracle: int int f(x - J u) g(x - v) exp(2 pi i <u, v>) dv du in the stated order. The inner
/// v-integral is a trapezoidal sum over one period of g; it is nonzero only for u on the lattice
/// Z^n / L, so the outer integral becomes sum_k f(x - J k / L) I(x, k) / L^n with f evaluated
/// from its formula. `points` lists the grid indices to evaluate (empty: every grid point).
GridFunction deformed_product_quad(const Profile& f, const Profile& g, const GridSpec& spec, const SkewMatrix& J,
                                   const std::vector<std::size_t>& points = {});

/// max_i |a_i - b_i| over the listed indices (all when empty), divided by the sup of |a| over
/// the whole grid. Sampled points in the tails therefore do not inflate the error.
double relative_error(const GridFunction& a, const GridFunction& b, const std::vector<std::size_t>& points = {});

/// f*(x) = conj f(x).
GridFunction involution(const GridFunction& f);
/// (tau_y f)(x) = f(x - y h) for an integer grid shift y.
GridFunction translate(const GridFunction& f, const std::vector<int>& shift);

struct StarAlgebraDefects {
  double involution = 0.0;
  double associativity = 0.0;
};

/// Max relative ||(f g)* - g* f*|| over pairs and ||(f g) h - f (g h)|| over triples of samples.
StarAlgebraDefects check_star_algebra(const SkewMatrix& J, const std::vector<GridFunction>& samples);

/// Matrix of xi -> f x_J xi on the plane waves e_b, b in {-m/2, ..., m/2 - 1}^n (row-major):
/// entry (a, b) = f_{a-b} omega_J(a - b, b) with f_c the Fourier-series coefficients of f.
Matrix left_mult_matrix(const GridFunction& f, const SkewMatrix& J, int m);

}  // namespace twistfix
