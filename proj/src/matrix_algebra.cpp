#include "twistfix/matrix_algebra.hpp"

#include "twistfix/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace twistfix {

namespace {

constexpr double kBandLow = 1e-3;
constexpr double kBandHigh = 1e3;
constexpr double kClusterRadius = 1e-6;

Eigen::VectorXd singular_values(const Matrix& a) {
  if (a.size() == 0) return {};
  // The SVD of A and of A^* share singular values; work with the wide orientation.
  if (a.rows() < a.cols()) return Eigen::BDCSVD<Matrix>(a.adjoint()).singularValues();
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

std::size_t decide_rank(const Eigen::VectorXd& sv, double tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double top = sv(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double rel = sv(i) / top;
    if (rel > tol * kBandLow && rel < tol * kBandHigh) {
      throw IllConditioned("rank decision ambiguous: relative singular value " + std::to_string(rel) +
                           " lies in the tolerance band around " + std::to_string(tol));
    }
    if (rel >= tol * kBandHigh) ++rank;
  }
  return rank;
}

}  // namespace

std::size_t numerical_rank(const Matrix& a, double tol) { return decide_rank(singular_values(a), tol); }

Matrix nullspace(const Matrix& a, double tol, double scale) {
  const auto n = a.cols();
  if (n == 0) return Matrix(0, 0);
  if (a.rows() == 0) return Matrix::Identity(n, n);
  // Gram form keeps the SVD at n x n regardless of how many constraint rows there are.
  const Matrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const double top = std::max(ev.maxCoeff(), scale * scale);
  if (top == 0.0) return Matrix::Identity(n, n);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rel = std::sqrt(ev(i) / top);
    // Eigenvalues of A^*A carry absolute error ~ eps * top, so relative singular values
    // below ~1e-7 are not resolved by this route; treat the lower band edge accordingly.
    if (rel > std::max(tol * kBandLow, 1e-7) && rel < tol * kBandHigh) {
      throw IllConditioned("nullspace ambiguous: relative singular value " + std::to_string(rel) +
                           " lies in the tolerance band around " + std::to_string(tol));
    }
    if (rel < tol * kBandHigh) keep.push_back(i);
  }
  Matrix out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  return out;
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector SpanBuilder::residual(const Vector& v) const {
  Vector r = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis_) r -= b * b.dot(r);
  }
  return r;
}

bool SpanBuilder::contains(const Vector& v) const {
  const double n = v.norm();
  if (n == 0.0) return true;
  return residual(v).norm() <= tol_ * std::max(n, scale_);
}

bool SpanBuilder::add(const Vector& v) {
  const double n = v.norm();
  if (n == 0.0) return false;
  scale_ = std::max(scale_, n);
  Vector r = residual(v);
  const double rn = r.norm();
  if (rn <= tol_ * std::max(n, scale_ * 1e-4)) return false;
  basis_.push_back(r / rn);
  return true;
}

std::size_t span_dimension(const std::vector<Matrix>& mats, double tol) {
  if (mats.empty()) return 0;
  Matrix stacked(mats.front().size(), static_cast<Eigen::Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = flatten(mats[i]);
  return numerical_rank(stacked, tol);
}

std::vector<Vector> ideal_closure(const std::vector<Matrix>& seeds, const std::vector<Matrix>& generators,
                                  double tol, std::size_t max_dim) {
  if (seeds.empty()) return {};
  const auto rows = seeds.front().rows();
  const auto cols = seeds.front().cols();
  double scale = 0.0;
  for (const auto& s : seeds) scale = std::max(scale, s.norm());
  if (scale == 0.0) return {};
  SpanBuilder span(rows * cols, tol);
  std::size_t processed = 0;
  auto full = [&] { return max_dim > 0 && span.dimension() >= max_dim; };
  for (const auto& s : seeds) {
    span.add(flatten(s) / scale);
    if (full()) return span.basis();
  }
  while (processed < span.dimension() && !full()) {
    const Matrix x = unflatten(span.basis()[processed++], rows, cols);
    for (const auto& g : generators) {
      span.add(flatten(g * x));
      span.add(flatten(x * g));
      if (full()) break;
    }
  }
  return span.basis();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const auto sv = singular_values(m);
  return sv.size() ? sv(0) : 0.0;
}

WedderburnResult wedderburn_blocks(const std::vector<Matrix>& basis, const std::vector<Matrix>& generators,
                                   std::uint64_t seed, double tol) {
  WedderburnResult out;
  if (basis.empty()) return out;
  const auto d = basis.front().rows();
  const auto len = d * d;

  // Orthonormal basis of the algebra.
  SpanBuilder span(len, tol);
  for (const auto& b : basis) span.add(flatten(b));
  const auto n = static_cast<Eigen::Index>(span.dimension());
  out.algebra_dim = span.dimension();
  if (n == 0) return out;
  std::vector<Matrix> ob;
  for (const auto& v : span.basis()) ob.push_back(unflatten(v, d, d));

  // Center: coefficient vectors c with [sum c_i ob_i, g] = 0 for all generators.
  Matrix constraints(len * static_cast<Eigen::Index>(generators.size()), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < generators.size(); ++k) {
      const Matrix& g = generators[k];
      constraints.block(static_cast<Eigen::Index>(k) * len, i, len, 1) = flatten(ob[i] * g - g * ob[i]);
    }
  }
  double gen_norm = 0.0;
  for (const auto& g : generators) gen_norm = std::max(gen_norm, g.norm());
  const Matrix center = generators.empty() ? Matrix::Identity(n, n) : nullspace(constraints, tol, 2.0 * gen_norm);
  out.center_dim = static_cast<std::size_t>(center.cols());
  std::vector<Matrix> central;
  for (Eigen::Index j = 0; j < center.cols(); ++j) {
    Matrix z = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) z += center(i, j) * ob[i];
    central.push_back(z);
  }

  for (int attempt = 0; attempt < 8; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> normal;
    Matrix h = Matrix::Zero(d, d);
    for (const auto& z : central) h += Complex(normal(rng), normal(rng)) * z;
    h = (h + h.adjoint()).eval();
    const double hn = h.norm();
    if (hn > 0) h /= hn;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& ev = es.eigenvalues();
    // Cluster sorted eigenvalues.
    std::vector<std::vector<Eigen::Index>> clusters;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (clusters.empty() || ev(i) - ev(clusters.back().back()) > kClusterRadius) clusters.emplace_back();
      clusters.back().push_back(i);
    }
    std::vector<int> blocks;
    bool consistent = true;
    std::size_t total = 0;
    for (const auto& cl : clusters) {
      Matrix v(d, static_cast<Eigen::Index>(cl.size()));
      for (std::size_t j = 0; j < cl.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(cl[j]);
      const Matrix p = v * v.adjoint();
      std::vector<Matrix> compressed;
      compressed.reserve(ob.size());
      for (const auto& b : ob) compressed.push_back(p * b * p);
      const auto dim = span_dimension(compressed, tol);
      if (dim == 0) continue;
      const auto root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
      if (static_cast<std::size_t>(root * root) != dim) {
        consistent = false;
        break;
      }
      blocks.push_back(root);
      total += dim;
    }
    if (!consistent || total != out.algebra_dim || blocks.size() != out.center_dim) continue;
    std::sort(blocks.begin(), blocks.end(), std::greater<>());
    out.blocks = blocks;
    return out;
  }
  throw IllConditioned("Wedderburn split did not stabilize: center dimension " + std::to_string(out.center_dim) +
                       ", algebra dimension " + std::to_string(out.algebra_dim));
}

}  // namespace twistfix
