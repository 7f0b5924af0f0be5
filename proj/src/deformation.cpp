#include "twistfix/deformation.hpp"

#include "twistfix/parallel.hpp"

#include "fft_util.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace twistfix {

namespace detail {

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex plan_mutex;
}  // namespace

void fft_inplace(std::vector<Complex>& data, const std::vector<int>& dims, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex);
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(plan_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void fft(std::vector<Complex>& data, const GridSpec& spec, int sign) {
  detail::fft_inplace(data, std::vector<int>(static_cast<std::size_t>(spec.n), spec.N), sign);
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch between operands");
}

int signed_freq(int idx, int N) { return idx < N / 2 ? idx : idx - N; }
int fft_index(int k, int N) { return k < 0 ? k + N : k; }

double wrap_offset(double d, double L) { return d - L * std::round(d / L); }

}  // namespace

std::size_t GridSpec::points() const {
  std::size_t p = 1;
  for (int i = 0; i < n; ++i) p *= static_cast<std::size_t>(N);
  return p;
}

void validate(const GridSpec& spec) {
  if (spec.n < 1 || spec.n > 2) throw std::invalid_argument("grid dimension n must be 1 or 2");
  if (spec.N < 2 || (spec.N & (spec.N - 1)) != 0) throw std::invalid_argument("samples per axis N must be a power of two >= 2");
  if (!(spec.L > 0.0)) throw std::invalid_argument("period L must be positive");
}

Profile gaussian(double width, const GridSpec& spec) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  const double L = spec.L;
  return [width, L](const Point& x) {
    double r2 = 0.0;
    for (double xi : x) {
      const double d = wrap_offset(xi - L / 2.0, L);
      r2 += d * d;
    }
    return Complex(std::exp(-std::numbers::pi * r2 / (width * width)), 0.0);
  };
}

Profile plane_wave(const std::vector<int>& a, const GridSpec& spec) {
  if (static_cast<int>(a.size()) != spec.n) throw std::invalid_argument("plane wave frequency has the wrong dimension");
  const double L = spec.L;
  return [a, L](const Point& x) {
    double phase = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) phase += a[i] * x[i];
    return std::polar(1.0, kTwoPi * phase / L);
  };
}

Profile parse_profile(std::string_view text, const GridSpec& spec) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("function spec needs the form kind:args");
  const std::string kind(text.substr(0, colon));
  const std::string args(text.substr(colon + 1));
  try {
    if (kind == "gaussian") return gaussian(std::stod(args), spec);
    if (kind == "const") {
      const double c = std::stod(args);
      return [c](const Point&) { return Complex(c, 0.0); };
    }
    if (kind == "wave") {
      std::vector<int> a;
      std::stringstream ss(args);
      std::string tok;
      while (std::getline(ss, tok, ',')) a.push_back(std::stoi(tok));
      return plane_wave(a, spec);
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("bad function spec '" + std::string(text) + "': " + e.what());
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("bad function spec '" + std::string(text) + "'");
  }
  throw std::invalid_argument("unknown function kind '" + kind + "' (expected gaussian, wave or const)");
}

GridFunction sample(const GridSpec& spec, const Profile& f) {
  validate(spec);
  GridFunction out{spec, std::vector<Complex>(spec.points())};
  const double h = spec.spacing();
  Point x(static_cast<std::size_t>(spec.n));
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    std::size_t rest = idx;
    for (int i = spec.n - 1; i >= 0; --i) {
      x[static_cast<std::size_t>(i)] = static_cast<double>(rest % static_cast<std::size_t>(spec.N)) * h;
      rest /= static_cast<std::size_t>(spec.N);
    }
    out.values[idx] = f(x);
  }
  return out;
}

Spectrum forward(const GridFunction& f) {
  validate(f.spec);
  Spectrum s{f.spec, f.values};
  fft(s.values, s.spec, FFTW_FORWARD);
  const double scale = std::pow(f.spec.spacing(), f.spec.n);
  for (auto& v : s.values) v *= scale;
  return s;
}

GridFunction inverse(const Spectrum& s) {
  validate(s.spec);
  GridFunction f{s.spec, s.values};
  fft(f.values, f.spec, FFTW_BACKWARD);
  const double scale = 1.0 / std::pow(s.spec.L, s.spec.n);
  for (auto& v : f.values) v *= scale;
  return f;
}

SkewMatrix::SkewMatrix(std::vector<std::vector<double>> j) {
  const auto n = j.size();
  if (n < 1) throw std::invalid_argument("skew matrix must be at least 1x1");
  for (const auto& row : j) {
    if (row.size() != n) throw std::invalid_argument("skew matrix must be square");
  }
  j_.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) j_[a][b] = (j[a][b] - j[b][a]) / 2.0;
  }
}

SkewMatrix SkewMatrix::standard(int n, double theta) {
  if (n == 1) return SkewMatrix(std::vector<std::vector<double>>{{0.0}});
  if (n == 2) return SkewMatrix(std::vector<std::vector<double>>{{0.0, theta}, {-theta, 0.0}});
  throw std::invalid_argument("standard skew matrix is defined for n = 1, 2");
}

bool SkewMatrix::is_zero() const {
  for (const auto& row : j_) {
    for (double v : row) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

Complex omega_J(const SkewMatrix& J, const std::vector<int>& a, const std::vector<int>& b, double L) {
  double s = 0.0;
  for (int i = 0; i < J.n(); ++i) {
    for (int k = 0; k < J.n(); ++k) s += J(i, k) * a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(i)];
  }
  return std::polar(1.0, kTwoPi * s / (L * L));
}

Spectrum twisted_conv_freq(const Spectrum& F, const Spectrum& G, const SkewMatrix& J) {
  require_same_grid(F.spec, G.spec);
  const auto& spec = F.spec;
  validate(spec);
  if (J.n() != spec.n) throw std::invalid_argument("skew matrix dimension does not match the grid");
  const int N = spec.N;
  const int half = N / 2;
  const double norm = 1.0 / std::pow(spec.L, spec.n);
  Spectrum out{spec, std::vector<Complex>(spec.points(), Complex(0.0))};

  if (spec.n == 1) {
    for (int z = -half; z < half; ++z) {
      Complex acc = 0.0;
      for (int k = std::max(-half, z - half + 1); k <= std::min(half - 1, z + half); ++k) {
        acc += F.values[static_cast<std::size_t>(fft_index(k, N))] * G.values[static_cast<std::size_t>(fft_index(z - k, N))];
      }
      out.values[static_cast<std::size_t>(fft_index(z, N))] = acc * norm;
    }
    return out;
  }

  // Centred copies: c[(k0 + N/2) N + (k1 + N/2)].
  auto centred = [&](const Spectrum& s) {
    std::vector<Complex> c(s.values.size());
    for (int i0 = 0; i0 < N; ++i0) {
      for (int i1 = 0; i1 < N; ++i1) {
        const int k0 = signed_freq(i0, N) + half;
        const int k1 = signed_freq(i1, N) + half;
        c[static_cast<std::size_t>(k0 * N + k1)] = s.values[static_cast<std::size_t>(i0 * N + i1)];
      }
    }
    return c;
  };
  const auto fc = centred(F);
  const auto gc = centred(G);
  // <J k, z - k> = J_01 (k1 z0 - k0 z1) for n = 2; |k1 z0 - k0 z1| <= N^2 / 2.
  const int amax = N * N / 2;
  std::vector<Complex> table(static_cast<std::size_t>(2 * amax + 1));
  const double coef = kTwoPi * J(0, 1) / (spec.L * spec.L);
  for (int a = -amax; a <= amax; ++a) table[static_cast<std::size_t>(a + amax)] = std::polar(1.0, coef * a);

  parallel_for(static_cast<std::size_t>(N), [&](std::size_t row) {
    const int z0 = static_cast<int>(row) - half;
    std::vector<Complex> acc(static_cast<std::size_t>(N), Complex(0.0));
    for (int k0 = std::max(-half, z0 - half + 1); k0 <= std::min(half - 1, z0 + half); ++k0) {
      const int m0 = z0 - k0;
      const Complex* frow = &fc[static_cast<std::size_t>((k0 + half) * N)];
      const Complex* grow = &gc[static_cast<std::size_t>((m0 + half) * N)];
      for (int z1 = -half; z1 < half; ++z1) {
        Complex sum = 0.0;
        const int lo = std::max(-half, z1 - half + 1);
        const int hi = std::min(half - 1, z1 + half);
        for (int k1 = lo; k1 <= hi; ++k1) {
          sum += frow[k1 + half] * grow[z1 - k1 + half] * table[static_cast<std::size_t>(k1 * z0 - k0 * z1 + amax)];
        }
        acc[static_cast<std::size_t>(z1 + half)] += sum;
      }
    }
    for (int z1 = -half; z1 < half; ++z1) {
      out.values[static_cast<std::size_t>(fft_index(z0, N) * N + fft_index(z1, N))] =
          acc[static_cast<std::size_t>(z1 + half)] * norm;
    }
  });
  return out;
}

namespace {

double high_frequency_mass(const Spectrum& s) {
  const int N = s.spec.N;
  double hi = 0.0;
  double total = 0.0;
  for (std::size_t idx = 0; idx < s.values.size(); ++idx) {
    std::size_t rest = idx;
    int linf = 0;
    for (int i = 0; i < s.spec.n; ++i) {
      linf = std::max(linf, std::abs(signed_freq(static_cast<int>(rest % static_cast<std::size_t>(N)), N)));
      rest /= static_cast<std::size_t>(N);
    }
    const double e = std::norm(s.values[idx]);
    total += e;
    if (linf >= N / 4) hi += e;
  }
  return total > 0.0 ? hi / total : 0.0;
}

}  // namespace

ProductResult deformed_product(const GridFunction& f, const GridFunction& g, const SkewMatrix& J) {
  require_same_grid(f.spec, g.spec);
  const auto F = forward(f);
  const auto G = forward(g);
  ProductResult out;
  out.high_frequency_mass = std::max(high_frequency_mass(F), high_frequency_mass(G));
  if (out.high_frequency_mass > 1e-10) {
    std::ostringstream msg;
    msg << "aliasing risk: high-frequency mass " << out.high_frequency_mass << " exceeds 1e-10";
    out.warnings.push_back(msg.str());
  }
  out.value = inverse(twisted_conv_freq(F, G, J));
  return out;
}

GridFunction deformed_product_quad(const Profile& f, const Profile& g, const GridSpec& spec, const SkewMatrix& J,
                                   const std::vector<std::size_t>& points) {
  validate(spec);
  if (J.n() != spec.n) throw std::invalid_argument("skew matrix dimension does not match the grid");
  const int N = spec.N;
  const int half = N / 2;
  const double h = spec.spacing();
  const double L = spec.L;
  const auto gs = sample(spec, g);
  // e[k][q] = exp(2 pi i k q / N) for signed k.
  std::vector<Complex> e(static_cast<std::size_t>(N * N));
  for (int k = 0; k < N; ++k) {
    for (int q = 0; q < N; ++q) e[static_cast<std::size_t>(k * N + q)] = std::polar(1.0, kTwoPi * (k - half) * q / N);
  }
  std::vector<std::size_t> targets = points;
  if (targets.empty()) {
    targets.resize(spec.points());
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = i;
  }
  GridFunction out{spec, std::vector<Complex>(spec.points(), Complex(0.0))};
  const double inner_norm = 1.0 / std::pow(static_cast<double>(N), spec.n);  // (h / L)^n

  parallel_for(targets.size(), [&](std::size_t ti) {
    const auto p = targets[ti];
    if (spec.n == 1) {
      const int p0 = static_cast<int>(p);
      Complex result = 0.0;
      for (int k = 0; k < N; ++k) {
        // Inner v-integral: I(x, k) = L^{-1} int g(x - v) exp(2 pi i k v / L) dv.
        Complex inner = 0.0;
        for (int q = 0; q < N; ++q) {
          inner += gs.values[static_cast<std::size_t>(((p0 - q) % N + N) % N)] * e[static_cast<std::size_t>(k * N + q)];
        }
        result += f({p0 * h}) * inner * inner_norm;
      }
      out.values[p] = result;
      return;
    }
    const int p0 = static_cast<int>(p) / N;
    const int p1 = static_cast<int>(p) % N;
    // Inner integral, axis 1 then axis 0: a[q0][k1], then inner[k0][k1].
    std::vector<Complex> a(static_cast<std::size_t>(N * N), Complex(0.0));
    for (int q0 = 0; q0 < N; ++q0) {
      const int r0 = ((p0 - q0) % N + N) % N;
      for (int k1 = 0; k1 < N; ++k1) {
        Complex s = 0.0;
        for (int q1 = 0; q1 < N; ++q1) {
          const int r1 = ((p1 - q1) % N + N) % N;
          s += gs.values[static_cast<std::size_t>(r0 * N + r1)] * e[static_cast<std::size_t>(k1 * N + q1)];
        }
        a[static_cast<std::size_t>(q0 * N + k1)] = s;
      }
    }
    Complex result = 0.0;
    for (int k0 = 0; k0 < N; ++k0) {
      for (int k1 = 0; k1 < N; ++k1) {
        Complex inner = 0.0;
        for (int q0 = 0; q0 < N; ++q0) {
          inner += e[static_cast<std::size_t>(k0 * N + q0)] * a[static_cast<std::size_t>(q0 * N + k1)];
        }
        // Outer u-integral on the lattice u = k / L: f(x - J k / L).
        const double u0 = (k0 - half) / L;
        const double u1 = (k1 - half) / L;
        const Point shifted{p0 * h - (J(0, 0) * u0 + J(0, 1) * u1), p1 * h - (J(1, 0) * u0 + J(1, 1) * u1)};
        result += f(shifted) * inner * inner_norm;
      }
    }
    out.values[p] = result;
  });
  return out;
}

double relative_error(const GridFunction& a, const GridFunction& b, const std::vector<std::size_t>& points) {
  require_same_grid(a.spec, b.spec);
  double num = 0.0;
  double den = 0.0;
  for (const auto& v : a.values) den = std::max(den, std::abs(v));
  auto visit = [&](std::size_t i) { num = std::max(num, std::abs(a.values[i] - b.values[i])); };
  if (points.empty()) {
    for (std::size_t i = 0; i < a.values.size(); ++i) visit(i);
  } else {
    for (auto i : points) visit(i);
  }
  if (den == 0.0) return num;
  return num / den;
}

GridFunction involution(const GridFunction& f) {
  auto out = f;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

GridFunction translate(const GridFunction& f, const std::vector<int>& shift) {
  const auto& spec = f.spec;
  if (static_cast<int>(shift.size()) != spec.n) throw std::invalid_argument("shift has the wrong dimension");
  const int N = spec.N;
  GridFunction out{spec, std::vector<Complex>(f.values.size())};
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    std::size_t rest = idx;
    std::size_t src = 0;
    std::size_t stride = 1;
    for (int i = spec.n - 1; i >= 0; --i) {
      const int c = static_cast<int>(rest % static_cast<std::size_t>(N));
      rest /= static_cast<std::size_t>(N);
      const int s = ((c - shift[static_cast<std::size_t>(i)]) % N + N) % N;
      src += static_cast<std::size_t>(s) * stride;
      stride *= static_cast<std::size_t>(N);
    }
    out.values[idx] = f.values[src];
  }
  return out;
}

StarAlgebraDefects check_star_algebra(const SkewMatrix& J, const std::vector<GridFunction>& samples) {
  StarAlgebraDefects out;
  const auto n = samples.size();
  std::vector<GridFunction> products(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) products[i * n + j] = deformed_product(samples[i], samples[j], J).value;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto lhs = involution(products[i * n + j]);
      const auto rhs = deformed_product(involution(samples[j]), involution(samples[i]), J).value;
      out.involution = std::max(out.involution, relative_error(lhs, rhs));
      for (std::size_t k = 0; k < n; ++k) {
        const auto left = deformed_product(products[i * n + j], samples[k], J).value;
        const auto right = deformed_product(samples[i], products[j * n + k], J).value;
        out.associativity = std::max(out.associativity, relative_error(left, right));
      }
    }
  }
  return out;
}

Matrix left_mult_matrix(const GridFunction& f, const SkewMatrix& J, int m) {
  const auto& spec = f.spec;
  if (m < 1 || m > spec.N) throw std::invalid_argument("basis size m must be in 1..N");
  const auto F = forward(f);
  const int N = spec.N;
  const double coef = 1.0 / std::pow(spec.L, spec.n);
  const int lo = -(m / 2);
  std::vector<std::vector<int>> waves;
  if (spec.n == 1) {
    for (int a = lo; a < lo + m; ++a) waves.push_back({a});
  } else {
    for (int a = lo; a < lo + m; ++a) {
      for (int b = lo; b < lo + m; ++b) waves.push_back({a, b});
    }
  }
  const auto size = static_cast<Eigen::Index>(waves.size());
  Matrix out = Matrix::Zero(size, size);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (Eigen::Index c = 0; c < size; ++c) {
      const auto& a = waves[static_cast<std::size_t>(r)];
      const auto& b = waves[static_cast<std::size_t>(c)];
      std::vector<int> diff(a.size());
      std::size_t idx = 0;
      bool inside = true;
      for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = a[i] - b[i];
        if (diff[i] < -N / 2 || diff[i] >= N / 2) inside = false;
        idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(fft_index(diff[i], N));
      }
      if (!inside) continue;
      out(r, c) = F.values[idx] * coef * omega_J(J, diff, b, spec.L);
    }
  }
  return out;
}

}  // namespace twistfix
