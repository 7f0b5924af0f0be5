#include "twistfix/sq_modules.hpp"

#include "twistfix/errors.hpp"

#include "fft_util.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace twistfix {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Element minus(const Element& a, const Element& b) {
  Element out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Element plus(const Element& a, const Element& b) {
  Element out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

double torus_coord_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

double torus_dist(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = torus_coord_dist(x[i], y[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> grid_point(std::size_t idx, int k, int grid) {
  std::vector<double> x(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    x[static_cast<std::size_t>(i)] = static_cast<double>(idx % static_cast<std::size_t>(grid)) / grid;
    idx /= static_cast<std::size_t>(grid);
  }
  return x;
}

std::size_t grid_size(int k, int grid) {
  std::size_t n = 1;
  for (int i = 0; i < k; ++i) n *= static_cast<std::size_t>(grid);
  return n;
}

void require_compatible(const SequenceVector& a, const SequenceVector& b) {
  if (a.components.empty() || b.components.empty()) throw std::invalid_argument("sequence vectors need components");
  if (a.components.size() != b.components.size()) throw std::invalid_argument("sequence vectors have different component counts");
  if (a.rank() != b.rank()) throw std::invalid_argument("sequence vectors live on different lattices");
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Lattice sequences

LatticeFunction::LatticeFunction(int k, int radius)
    : k_(k), radius_(radius), window_(Group::lattice(k, radius)), values_(window_.size(), Complex(0.0)) {}

LatticeFunction LatticeFunction::delta(int k, int radius, const Element& at, Complex c) {
  LatticeFunction f(k, radius);
  if (!f.window_.contains(at)) throw std::invalid_argument("delta position outside the window");
  f.values_[f.window_.index(at)] = c;
  return f;
}

Complex LatticeFunction::at(const Element& m) const {
  if (!window_.contains(m)) return 0.0;
  return values_[window_.index(m)];
}

double LatticeFunction::l1_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::abs(v);
  return s;
}

double LatticeFunction::l2_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

SequenceVector single(const LatticeFunction& f) { return SequenceVector{{f}}; }

Matrix laurent_operator(const LatticeFunction& phi, int window) {
  const auto w = Group::lattice(phi.rank(), window);
  const auto n = static_cast<Eigen::Index>(w.size());
  Matrix out(n, n);
  std::vector<Element> pts(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) pts[i] = w.element(i);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index s = 0; s < n; ++s) out(t, s) = phi.at(minus(pts[static_cast<std::size_t>(t)], pts[static_cast<std::size_t>(s)]));
  }
  return out;
}

LatticeFunction bracket_symbol(const SequenceVector& xi, const SequenceVector& eta) {
  require_compatible(xi, eta);
  LatticeFunction out(xi.rank(), xi.radius() + eta.radius());
  for (std::size_t c = 0; c < xi.components.size(); ++c) {
    const auto& a = xi.components[c];
    const auto& b = eta.components[c];
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == Complex(0.0)) continue;
      const auto nu = a.window().element(i);
      const Complex ca = std::conj(a[i]);
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (b[j] == Complex(0.0)) continue;
        out[out.window().index(minus(b.window().element(j), nu))] += ca * b[j];
      }
    }
  }
  return out;
}

LatticeFunction right_translate(const LatticeFunction& f, const Element& t) {
  std::int64_t reach = 0;
  for (auto v : t) reach = std::max<std::int64_t>(reach, v < 0 ? -v : v);
  LatticeFunction out(f.rank(), f.radius() + static_cast<int>(reach));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.at(plus(out.window().element(i), t));
  return out;
}

std::vector<Complex> torus_transform(const LatticeFunction& f, int M) {
  if (M < 2 * f.radius() + 1) throw std::invalid_argument("torus grid must have M >= 2R + 1 points per axis");
  const int k = f.rank();
  const auto n = grid_size(k, M);
  std::vector<Complex> out(n, Complex(0.0));
  std::vector<Element> pts(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pts[i] = f.window().element(i);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(k));
    std::size_t rest = a;
    for (int j = k - 1; j >= 0; --j) {
      idx[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(M));
      rest /= static_cast<std::size_t>(M);
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] == Complex(0.0)) continue;
      std::int64_t dot = 0;
      for (int j = 0; j < k; ++j) dot += pts[i][static_cast<std::size_t>(j)] * idx[static_cast<std::size_t>(j)];
      acc += f[i] * std::polar(1.0, kTwoPi * static_cast<double>(dot % M) / M);
    }
    out[a] = acc;
  }
  return out;
}

Matrix ket_operator(const SequenceVector& xi, int window, int module_window) {
  const int k = xi.rank();
  const auto w = Group::lattice(k, window);
  const auto mw = Group::lattice(k, module_window);
  const auto comps = xi.components.size();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(comps * mw.size()), static_cast<Eigen::Index>(w.size()));
  for (std::size_t c = 0; c < comps; ++c) {
    for (std::size_t r = 0; r < mw.size(); ++r) {
      const auto nu = mw.element(r);
      for (std::size_t t = 0; t < w.size(); ++t) {
        out(static_cast<Eigen::Index>(c * mw.size() + r), static_cast<Eigen::Index>(t)) =
            xi.components[c].at(minus(nu, w.element(t)));
      }
    }
  }
  return out;
}

Matrix bra_operator(const SequenceVector& xi, int window, int module_window) {
  return ket_operator(xi, window, module_window).adjoint();
}

KetBraReport ket_bra_check(const SequenceVector& xi, const SequenceVector& eta, int window, int module_window) {
  require_compatible(xi, eta);
  KetBraReport out;
  const int needed = window + std::max(xi.radius(), eta.radius());
  out.window = window;
  out.module_window = module_window < 0 ? needed : module_window;
  if (out.module_window < needed) {
    out.warnings.push_back("module window " + std::to_string(out.module_window) + " truncates translates (needs " +
                           std::to_string(needed) + ")");
  }
  const Matrix ket_eta = ket_operator(eta, window, out.module_window);
  const Matrix bra_xi = bra_operator(xi, window, out.module_window);
  const Matrix laurent = laurent_operator(bracket_symbol(xi, eta), window);
  out.laurent_defect = (bra_xi * ket_eta - laurent).cwiseAbs().maxCoeff();

  // sum_t rho_t |xi><eta| rho_t^*, with each translate restricted to the module window.
  const auto mw = Group::lattice(xi.rank(), out.module_window);
  const auto w = Group::lattice(xi.rank(), window);
  const auto comps = xi.components.size();
  const auto rows = static_cast<Eigen::Index>(comps * mw.size());
  Matrix sum = Matrix::Zero(rows, rows);
  for (std::size_t t = 0; t < w.size(); ++t) {
    const auto shift = w.element(t);
    Vector a(rows);
    Vector b(rows);
    for (std::size_t c = 0; c < comps; ++c) {
      for (std::size_t r = 0; r < mw.size(); ++r) {
        const auto nu = plus(mw.element(r), shift);
        a(static_cast<Eigen::Index>(c * mw.size() + r)) = xi.components[c].at(nu);
        b(static_cast<Eigen::Index>(c * mw.size() + r)) = eta.components[c].at(nu);
      }
    }
    sum += a * b.adjoint();
  }
  const Matrix ket_xi = ket_operator(xi, window, out.module_window);
  const Matrix bra_eta = bra_operator(eta, window, out.module_window);
  out.rank_one_defect = (ket_xi * bra_eta - sum).cwiseAbs().maxCoeff();
  return out;
}

BracketGram bracket_gram_positivity(const std::vector<SequenceVector>& family, int window) {
  BracketGram out;
  if (family.empty()) return out;
  const auto w = Group::lattice(family.front().rank(), window);
  const auto n = static_cast<Eigen::Index>(w.size());
  const auto f = static_cast<Eigen::Index>(family.size());
  Matrix gram(f * n, f * n);
  for (Eigen::Index i = 0; i < f; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      gram.block(i * n, j * n, n, n) =
          laurent_operator(bracket_symbol(family[static_cast<std::size_t>(i)], family[static_cast<std::size_t>(j)]), window);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((gram + gram.adjoint()) / 2.0), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

LatticeFunction fourier_coefficients(const TorusFunction& F, int k, int radius, int quadrature) {
  if (k < 1 || k > 2) throw std::invalid_argument("Fourier coefficients are implemented for k = 1, 2");
  if (quadrature < 2 * radius + 1) throw std::invalid_argument("quadrature grid too coarse for the requested radius");
  const int Q = quadrature;
  const auto samples = grid_size(k, Q);
  std::vector<Complex> vals(samples);
  for (std::size_t i = 0; i < samples; ++i) vals[i] = F(grid_point(i, k, Q));
  // e[nu + R][q] = exp(-2 pi i nu q / Q) / Q
  const int side = 2 * radius + 1;
  std::vector<Complex> e(static_cast<std::size_t>(side * Q));
  for (int nu = -radius; nu <= radius; ++nu) {
    for (int q = 0; q < Q; ++q) {
      e[static_cast<std::size_t>((nu + radius) * Q + q)] =
          std::polar(1.0 / Q, -kTwoPi * static_cast<double>((static_cast<long>(nu) * q) % Q) / Q);
    }
  }
  LatticeFunction out(k, radius);
  if (k == 1) {
    for (int nu = 0; nu < side; ++nu) {
      Complex acc = 0.0;
      for (int q = 0; q < Q; ++q) acc += vals[static_cast<std::size_t>(q)] * e[static_cast<std::size_t>(nu * Q + q)];
      out[static_cast<std::size_t>(nu)] = acc;
    }
    return out;
  }
  // Axis 1 first, then axis 0.
  std::vector<Complex> partial(static_cast<std::size_t>(Q * side));
  for (int q0 = 0; q0 < Q; ++q0) {
    for (int n1 = 0; n1 < side; ++n1) {
      Complex acc = 0.0;
      for (int q1 = 0; q1 < Q; ++q1) {
        acc += vals[static_cast<std::size_t>(q0 * Q + q1)] * e[static_cast<std::size_t>(n1 * Q + q1)];
      }
      partial[static_cast<std::size_t>(q0 * side + n1)] = acc;
    }
  }
  for (int n0 = 0; n0 < side; ++n0) {
    for (int n1 = 0; n1 < side; ++n1) {
      Complex acc = 0.0;
      for (int q0 = 0; q0 < Q; ++q0) {
        acc += partial[static_cast<std::size_t>(q0 * side + n1)] * e[static_cast<std::size_t>(n0 * Q + q0)];
      }
      out[static_cast<std::size_t>(n0 * side + n1)] = acc;
    }
  }
  return out;
}

LatticeFunction indicator_coefficients(double a, double b, int radius) {
  if (!(0.0 <= a && a < b && b <= 1.0)) throw std::invalid_argument("indicator interval must satisfy 0 <= a < b <= 1");
  LatticeFunction out(1, radius);
  for (int nu = -radius; nu <= radius; ++nu) {
    Complex c;
    if (nu == 0) {
      c = b - a;
    } else {
      const Complex denom(0.0, kTwoPi * nu);
      c = (std::polar(1.0, -kTwoPi * nu * a) - std::polar(1.0, -kTwoPi * nu * b)) / denom;
    }
    out[static_cast<std::size_t>(nu + radius)] = c;
  }
  return out;
}

std::vector<RelL1Row> rel_l1_report(const std::vector<std::function<SequenceVector(int)>>& generators,
                                    const std::vector<int>& radii) {
  std::vector<RelL1Row> out;
  for (int r : radii) {
    RelL1Row row{r, {}};
    std::vector<SequenceVector> vecs;
    for (const auto& g : generators) vecs.push_back(g(r));
    for (const auto& x : vecs) {
      for (const auto& y : vecs) row.norms.push_back(bracket_symbol(x, y).l1_norm());
    }
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Example: open subsets of the torus

TorusMask parse_mask(std::string_view spec, int k, int grid) {
  if (k < 1 || k > 2) throw std::invalid_argument("masks are implemented for k = 1, 2");
  if (grid < 4) throw std::invalid_argument("mask grid must have at least 4 points per axis");
  TorusMask mask;
  mask.name = std::string(spec);
  mask.k = k;
  const auto colon = spec.find(':');
  const std::string kind(spec.substr(0, colon));
  const std::string args = colon == std::string_view::npos ? std::string() : std::string(spec.substr(colon + 1));
  constexpr double inf = std::numeric_limits<double>::infinity();
  try {
    if (kind == "full" && args.empty()) {
      mask.contains = [](const std::vector<double>&) { return true; };
      mask.distance_to_complement = [](const std::vector<double>&) { return inf; };
    } else if (kind == "disk") {
      const double r = std::stod(args);
      if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("disk radius must lie in (0, 0.5)");
      const std::vector<double> centre(static_cast<std::size_t>(k), 0.5);
      mask.contains = [centre, r](const std::vector<double>& x) { return torus_dist(x, centre) > r; };
      mask.distance_to_complement = [centre, r](const std::vector<double>& x) {
        return std::max(0.0, torus_dist(x, centre) - r);
      };
    } else if (kind == "strip") {
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("strip needs a,b");
      const double a = std::stod(args.substr(0, comma));
      const double b = std::stod(args.substr(comma + 1));
      if (!(0.0 <= a && a <= b && b < 1.0)) throw std::invalid_argument("strip bounds must satisfy 0 <= a <= b < 1");
      if (b - a > 1.0 - 2.0 / grid) throw std::invalid_argument("strip leaves S without interior");
      mask.contains = [a, b](const std::vector<double>& x) { return x[0] < a || x[0] > b; };
      mask.distance_to_complement = [a, b](const std::vector<double>& x) {
        if (x[0] >= a && x[0] <= b) return 0.0;
        return std::min(torus_coord_dist(x[0], a), torus_coord_dist(x[0], b));
      };
    } else if (kind == "bitmap") {
      if (k != 2) throw std::invalid_argument("bitmap masks are two-dimensional");
      std::ifstream in(args);
      if (!in) throw std::invalid_argument("cannot open bitmap '" + args + "'");
      std::vector<std::vector<double>> holes;
      std::vector<bool> cells;
      std::string line;
      int rows = 0;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (static_cast<int>(line.size()) != grid) {
          throw std::invalid_argument("bitmap row " + std::to_string(rows) + " has " + std::to_string(line.size()) +
                                      " cells, expected " + std::to_string(grid));
        }
        for (int c = 0; c < grid; ++c) {
          if (line[static_cast<std::size_t>(c)] != '0' && line[static_cast<std::size_t>(c)] != '1') {
            throw std::invalid_argument("bitmap cells must be '0' or '1'");
          }
          const bool on = line[static_cast<std::size_t>(c)] == '1';
          cells.push_back(on);
          if (!on) holes.push_back({static_cast<double>(rows) / grid, static_cast<double>(c) / grid});
        }
        ++rows;
      }
      if (rows != grid) throw std::invalid_argument("bitmap must have " + std::to_string(grid) + " rows");
      const double half_cell = 0.5 / grid;
      mask.contains = [cells, grid](const std::vector<double>& x) {
        const auto r = static_cast<std::size_t>(std::lround(x[0] * grid)) % static_cast<std::size_t>(grid);
        const auto c = static_cast<std::size_t>(std::lround(x[1] * grid)) % static_cast<std::size_t>(grid);
        return static_cast<bool>(cells[r * static_cast<std::size_t>(grid) + c]);
      };
      mask.distance_to_complement = [holes, half_cell](const std::vector<double>& x) {
        double best = inf;
        for (const auto& h : holes) best = std::min(best, torus_dist(x, h));
        return std::max(0.0, best - half_cell);
      };
    } else {
      throw std::invalid_argument("unknown mask '" + std::string(spec) + "' (expected full, disk:r, strip:a,b, bitmap:<path>)");
    }
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("bad mask '" + std::string(spec) + "'");
  }
  // Interior at grid scale: some grid point farther than one cell from the complement.
  bool interior = false;
  for (std::size_t i = 0; i < grid_size(k, grid) && !interior; ++i) {
    interior = mask.distance_to_complement(grid_point(i, k, grid)) > 1.0 / grid;
  }
  if (!interior) throw std::invalid_argument("mask '" + std::string(spec) + "' has empty interior at grid scale");
  return mask;
}

double bump_value(const Bump& b, const std::vector<double>& x) {
  const double d = torus_dist(x, b.centre);
  if (d >= b.radius) return 0.0;
  const double q = d / b.radius;
  return std::exp(-1.0 / (1.0 - q * q));
}

std::vector<Bump> place_bumps(const TorusMask& mask, int count) {
  if (count < 1) throw std::invalid_argument("bump count must be positive");
  int m = 1;
  while (true) {
    std::size_t total = 1;
    for (int i = 0; i < mask.k; ++i) total *= static_cast<std::size_t>(m);
    if (total >= static_cast<std::size_t>(count)) break;
    ++m;
  }
  std::vector<Bump> out;
  const auto total = grid_size(mask.k, m);
  for (std::size_t i = 0; i < total; ++i) {
    auto c = grid_point(i, mask.k, m);
    for (auto& v : c) v += 0.5 / m;
    const double dist = mask.distance_to_complement(c);
    const double r = std::min(0.9 / m, 0.95 * dist);
    if (r > 0.0) out.push_back({c, r});
  }
  return out;
}

namespace {

std::vector<std::vector<double>> sample_bumps(const std::vector<Bump>& bumps, int k, int grid) {
  const auto n = grid_size(k, grid);
  std::vector<std::vector<double>> out(bumps.size(), std::vector<double>(n));
  for (std::size_t p = 0; p < n; ++p) {
    const auto x = grid_point(p, k, grid);
    for (std::size_t b = 0; b < bumps.size(); ++b) out[b][p] = bump_value(bumps[b], x);
  }
  return out;
}

}  // namespace

std::vector<std::vector<Complex>> subset_inner_products(const TorusMask& mask, int grid, int bump_count) {
  const auto bumps = place_bumps(mask, bump_count);
  const auto samples = sample_bumps(bumps, mask.k, grid);
  std::vector<std::vector<Complex>> out;
  for (const auto& a : samples) {
    for (const auto& b : samples) {
      std::vector<Complex> f(a.size());
      for (std::size_t p = 0; p < a.size(); ++p) f[p] = std::conj(Complex(a[p])) * b[p];
      out.push_back(std::move(f));
    }
  }
  return out;
}

SubsetReport example_subset(const TorusMask& mask, int grid, int bump_count, std::uint64_t seed) {
  SubsetReport out;
  out.mask = mask.name;
  out.k = mask.k;
  out.grid = grid;
  out.seed = seed;
  const auto bumps = place_bumps(mask, bump_count);
  out.bumps = bumps.size();
  const auto samples = sample_bumps(bumps, mask.k, grid);
  const auto n = grid_size(mask.k, grid);
  const auto ips = subset_inner_products(mask, grid, bump_count);
  out.inner_products = ips.size();

  std::vector<bool> in_s(n);
  for (std::size_t p = 0; p < n; ++p) in_s[p] = mask.contains(grid_point(p, mask.k, grid));
  for (const auto& f : ips) {
    for (std::size_t p = 0; p < n; ++p) {
      if (!in_s[p]) out.off_support_max = std::max(out.off_support_max, std::abs(f[p]));
    }
  }

  // Coverage and saturation.
  std::vector<double> cover(n, 0.0);
  for (const auto& s : samples) {
    for (std::size_t p = 0; p < n; ++p) cover[p] += s[p] * s[p];
  }
  out.coverage_min = n ? *std::min_element(cover.begin(), cover.end()) : 0.0;
  out.saturated = out.coverage_min > 1e-8;

  std::mt19937_64 rng(seed);
  // Commutators of the fixed-point operators |xi_i>><<xi_j|, applied in the Fourier picture
  // to random probe vectors: T zeta = IDFT(conj(xi_i^) xi_j^ DFT zeta).
  if (!ips.empty()) {
    const std::vector<int> dims(static_cast<std::size_t>(mask.k), grid);
    std::uniform_int_distribution<std::size_t> pick(0, ips.size() - 1);
    std::normal_distribution<double> normal;
    auto apply = [&](const std::vector<Complex>& symbol, std::vector<Complex> v) {
      detail::fft_inplace(v, dims, -1);
      for (std::size_t p = 0; p < n; ++p) v[p] *= symbol[p];
      detail::fft_inplace(v, dims, +1);
      for (auto& x : v) x /= static_cast<double>(n);
      return v;
    };
    auto sup = [](const std::vector<Complex>& v) {
      double m = 0.0;
      for (const auto& x : v) m = std::max(m, std::abs(x));
      return m;
    };
    const int trials = std::min<int>(24, static_cast<int>(ips.size() * ips.size()));
    for (int t = 0; t < trials; ++t) {
      const auto& a = ips[pick(rng)];
      const auto& b = ips[pick(rng)];
      std::vector<Complex> probe(n);
      for (auto& x : probe) x = Complex(normal(rng), normal(rng));
      const auto ab = apply(a, apply(b, probe));
      const auto ba = apply(b, apply(a, probe));
      double diff = 0.0;
      double norm = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        diff += std::norm(ab[p] - ba[p]);
        norm += std::norm(probe[p]);
      }
      const double scale = std::max(1e-300, sup(a) * sup(b));
      out.commutator_max = std::max(out.commutator_max, std::sqrt(diff / norm) / scale);
    }
  }

  // Point separation on sampled pairs.
  std::vector<std::size_t> covered;
  std::vector<std::size_t> outside;
  for (std::size_t p = 0; p < n; ++p) {
    if (in_s[p] && cover[p] > 1e-8) covered.push_back(p);
    if (!in_s[p]) outside.push_back(p);
  }
  auto separated = [&](std::size_t x, std::size_t y) {
    for (const auto& f : ips) {
      if (std::abs(f[x] - f[y]) > 1e-12) return true;
    }
    return false;
  };
  auto sample_pairs = [&](const std::vector<std::size_t>& pool, std::size_t& tested, std::size_t& hits) {
    if (pool.size() < 2) return;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int t = 0; t < 200; ++t) {
      const auto x = pool[pick(rng)];
      const auto y = pool[pick(rng)];
      if (x == y) continue;
      ++tested;
      if (separated(x, y)) ++hits;
    }
  };
  sample_pairs(covered, out.tested_pairs, out.separated_pairs);
  sample_pairs(outside, out.complement_tested, out.complement_separated);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Example: clutching bundles over T^2

namespace {

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

constexpr double kSeamInner = 0.1;
constexpr double kSeamOuter = 0.25;

double theta(double s) {
  const double d = std::min(s, 1.0 - s);
  return 0.5 * std::numbers::pi * smooth_step((d - kSeamInner) / (kSeamOuter - kSeamInner));
}

}  // namespace

ClutchingBundle ClutchingBundle::make(int m, int grid) {
  if (grid < 1) throw std::invalid_argument("bundle grid must be positive");
  ClutchingBundle b;
  b.m = m;
  b.grid = grid;
  for (int a = 0; a < grid; ++a) {
    Eigen::Matrix2cd t = Eigen::Matrix2cd::Identity();
    t(1, 1) = std::polar(1.0, kTwoPi * static_cast<double>((static_cast<long>(m) * a) % grid) / grid);
    b.transition.push_back(t);
  }
  return b;
}

SectionFamily clutching_sections(int m, int grid, int count) {
  if (grid < 16) throw std::invalid_argument("section grid must be at least 16");
  if (count < 1) throw std::invalid_argument("need at least one section");
  SectionFamily fam;
  fam.m = m;
  fam.grid = grid;
  const auto points = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid + 1);
  fam.sections.assign(static_cast<std::size_t>(count), std::vector<Eigen::Vector2cd>(points));
  for (int b = 0; b <= grid; ++b) {
    const double s = static_cast<double>(b) / grid;
    const double th = theta(s);
    const double beta = std::sin(th);
    const double h = std::cos(th);
    for (int a = 0; a < grid; ++a) {
      const double x = static_cast<double>(a) / grid;
      const auto idx = fam.index(a, b);
      const Complex zm = std::polar(1.0, -kTwoPi * static_cast<double>((static_cast<long>(m) * a) % grid) / grid);
      for (int i = 0; i < count; ++i) {
        Eigen::Vector2cd v;
        switch (i) {
          case 0: v << 1.0, 0.0; break;
          case 1: v << 0.0, beta; break;
          case 2: v << 0.0, (2 * b < grid ? h * zm : Complex(h)); break;
          case 3: v << beta, beta; break;
          default: {
            const int j = i - 3;
            v << beta * std::polar(1.0, kTwoPi * j * x), beta * std::polar(1.0, -kTwoPi * j * x);
          }
        }
        fam.sections[static_cast<std::size_t>(i)][idx] = v;
      }
    }
  }
  const auto bundle = ClutchingBundle::make(m, grid);
  for (const auto& sec : fam.sections) {
    for (int a = 0; a < grid; ++a) {
      const Eigen::Vector2cd glued = bundle.transition[static_cast<std::size_t>(a)] * sec[fam.index(a, 0)];
      fam.seam_defect = std::max(fam.seam_defect, (sec[fam.index(a, grid)] - glued).norm());
    }
  }
  fam.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < points; ++p) {
    Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
    for (const auto& sec : fam.sections) g += sec[p] * sec[p].adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < 1e-8) {
      throw RankDeficient("fiber Gram is singular at grid point (a=" + std::to_string(p % static_cast<std::size_t>(grid)) +
                              ", b=" + std::to_string(p / static_cast<std::size_t>(grid)) + ")",
                          p);
    }
    fam.min_gram_eigenvalue = std::min(fam.min_gram_eigenvalue, lo);
  }
  return fam;
}

int chern_number(const ClutchingBundle& bundle) {
  const auto n = bundle.transition.size();
  if (n == 0) throw ResolutionError("no transition samples");
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const Complex d0 = bundle.transition[a].determinant();
    const Complex d1 = bundle.transition[(a + 1) % n].determinant();
    if (std::abs(std::abs(d0) - 1.0) > 1e-10) throw ResolutionError("transition is not unimodular");
    const double step = std::arg(d1 / d0);
    if (std::abs(step) > 0.75 * std::numbers::pi) {
      throw ResolutionError("phase jump " + std::to_string(step) + " between samples " + std::to_string(a) + " and " +
                            std::to_string((a + 1) % n) + " is too large to resolve");
    }
    total += step;
  }
  const auto w = static_cast<int>(std::lround(total / kTwoPi));
  if (8 * static_cast<std::size_t>(std::abs(w)) > n) {
    throw ResolutionError("grid of " + std::to_string(n) + " samples is too coarse for winding " + std::to_string(w));
  }
  return w;
}

BundleReport fixedpoint_bundle_report(const ClutchingBundle& bundle, const SectionFamily& sections) {
  if (bundle.m != sections.m || bundle.grid != sections.grid) throw std::invalid_argument("bundle and sections disagree");
  BundleReport out;
  out.m = bundle.m;
  out.grid = bundle.grid;
  out.seam_defect = sections.seam_defect;
  out.min_gram_eigenvalue = sections.min_gram_eigenvalue;
  out.min_fiber_dim = 4;
  const auto points = sections.sections.front().size();
  const auto count = sections.sections.size();
  for (std::size_t p = 0; p < points; ++p) {
    Matrix span(4, static_cast<Eigen::Index>(count * count));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        const Eigen::Matrix2cd e = sections.sections[i][p] * sections.sections[j][p].adjoint();
        span.col(static_cast<Eigen::Index>(i * count + j)) = Eigen::Map<const Eigen::Vector4cd>(e.data());
      }
    }
    const auto dim = numerical_rank(span);
    out.min_fiber_dim = std::min(out.min_fiber_dim, dim);
    out.max_fiber_dim = std::max(out.max_fiber_dim, dim);
    if (dim < 4) {
      throw NotFull("fiber algebra has dimension " + std::to_string(dim) + " < 4 at grid point (a=" +
                        std::to_string(p % static_cast<std::size_t>(sections.grid)) + ", b=" +
                        std::to_string(p / static_cast<std::size_t>(sections.grid)) + ")",
                    p);
    }
  }
  out.chern = chern_number(bundle);
  return out;
}

}  // namespace twistfix
