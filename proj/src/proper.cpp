#include "twistfix/proper.hpp"

#include "twistfix/errors.hpp"
#include "twistfix/twisted_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace twistfix {

namespace {

double rel_gap(const Matrix& a, const Matrix& b) {
  const double scale = std::max({1.0, a.norm(), b.norm()});
  return (a - b).norm() / scale;
}

std::vector<Matrix> orthonormal_mats(const SpanBuilder& span, Eigen::Index d) {
  std::vector<Matrix> out;
  out.reserve(span.dimension());
  for (const auto& v : span.basis()) out.push_back(unflatten(v, d, d));
  return out;
}

Matrix random_element(const StarAlgebra& a, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector c(static_cast<Eigen::Index>(a.dim()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = Complex(normal(rng), normal(rng));
  return a.element(c);
}

Matrix random_in_span(const std::vector<Matrix>& span, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix x = Matrix::Zero(d, d);
  for (const auto& m : span) x += Complex(normal(rng), normal(rng)) * m;
  return x;
}

std::size_t bracket_ideal_dim(const std::vector<Matrix>& R, const GAlgebra& act, const CrossedRep& rep) {
  std::vector<Matrix> seeds;
  for (const auto& xi : R) {
    for (const auto& eta : R) seeds.push_back(represent(rep, act, bracket(xi, eta, act)));
  }
  std::vector<Matrix> gens;
  for (const auto& g : act.algebra().generators()) gens.push_back(represent(rep, act, g));
  const auto& grp = act.group();
  for (std::size_t j = 0; j < grp.rank(); ++j) gens.push_back(rep.pair.unitaries[grp.generator(j)]);
  return ideal_closure(seeds, gens, kRankTol, rep.crossed_dim).size();
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// StarAlgebra

StarAlgebra::StarAlgebra(std::vector<Matrix> basis, std::vector<Matrix> generators)
    : basis_(std::move(basis)), generators_(std::move(generators)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  Matrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = basis_[i].conjugate().cwiseProduct(basis_[j]).sum();
  }
  gram_.compute(gram);
  if (generators_.empty()) generators_ = basis_;
}

StarAlgebra StarAlgebra::from_basis(std::vector<Matrix> basis, std::vector<Matrix> generators) {
  if (basis.empty()) throw std::invalid_argument("algebra basis is empty");
  const auto d = basis.front().rows();
  for (const auto& b : basis) {
    if (b.rows() != d || b.cols() != d) throw std::invalid_argument("algebra basis matrices must share a square shape");
  }
  if (span_dimension(basis) != basis.size()) throw std::invalid_argument("algebra basis is linearly dependent");
  StarAlgebra a(std::move(basis), std::move(generators));
  for (const auto& x : a.basis_) {
    if (a.distance(x.adjoint()) > 1e-10 * std::max(1.0, x.norm())) throw InconsistentAlgebra("span is not closed under adjoints");
    for (const auto& y : a.basis_) {
      const Matrix p = x * y;
      if (a.distance(p) > 1e-10 * std::max(1.0, p.norm())) throw InconsistentAlgebra("span is not closed under products");
    }
  }
  return a;
}

StarAlgebra StarAlgebra::matrix_blocks(const std::vector<int>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("need at least one block");
  int d = 0;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("block sizes must be positive");
    d += s;
  }
  std::vector<Matrix> basis;
  int offset = 0;
  for (int s : sizes) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        Matrix e = Matrix::Zero(d, d);
        e(offset + i, offset + j) = 1.0;
        basis.push_back(e);
      }
    }
    offset += s;
  }
  return StarAlgebra(std::move(basis), {});
}

StarAlgebra StarAlgebra::twisted_group_algebra(const Cocycle& omega) {
  const auto& g = omega.group();
  std::vector<Matrix> basis;
  for (std::size_t t = 0; t < g.size(); ++t) basis.push_back(left_regular_point(t, omega).to_matrix());
  std::vector<Matrix> gens;
  for (std::size_t j = 0; j < g.rank(); ++j) gens.push_back(basis[g.generator(j)]);
  return StarAlgebra(std::move(basis), std::move(gens));
}

Vector StarAlgebra::coords(const Matrix& x) const {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  Vector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = basis_[i].conjugate().cwiseProduct(x).sum();
  return gram_.solve(rhs);
}

Matrix StarAlgebra::element(const Vector& c) const {
  Matrix x = Matrix::Zero(rep_dim(), rep_dim());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i) != Complex(0.0)) x += c(i) * basis_[i];
  }
  return x;
}

double StarAlgebra::distance(const Matrix& x) const { return (element(coords(x)) - x).norm(); }

bool StarAlgebra::is_unital() const {
  const Matrix id = Matrix::Identity(rep_dim(), rep_dim());
  return distance(id) < 1e-10;
}

// ---------------------------------------------------------------------------------------------
// GAlgebra

GAlgebra::GAlgebra(StarAlgebra algebra, Group group, std::vector<Matrix> action_maps, std::optional<CovariantPair> pair)
    : algebra_(std::move(algebra)), group_(std::move(group)), maps_(std::move(action_maps)), pair_(std::move(pair)) {
  if (group_.is_lattice()) throw std::invalid_argument("G-algebras need a finite group; use ShiftModel for lattices");
  const auto n = static_cast<Eigen::Index>(algebra_.dim());
  if (maps_.size() != group_.size()) throw InconsistentAction("need one action map per group element");
  for (const auto& m : maps_) {
    if (m.rows() != n || m.cols() != n) throw InconsistentAction("action maps must be dim(A) x dim(A)");
  }
  if (rel_gap(maps_[group_.identity()], Matrix::Identity(n, n)) > kAlgebraTol) {
    throw InconsistentAction("alpha_e is not the identity");
  }
  for (std::size_t s = 0; s < group_.size(); ++s) {
    for (std::size_t t = 0; t < group_.size(); ++t) {
      if (rel_gap(maps_[s] * maps_[t], maps_[group_.add(s, t)]) > kAlgebraTol) {
        throw InconsistentAction("alpha_s alpha_t != alpha_{s+t} for s=" + std::to_string(s) + ", t=" + std::to_string(t));
      }
    }
  }
  // The homomorphism property reduces the automorphism checks to the cyclic generators.
  for (std::size_t j = 0; j < group_.rank(); ++j) {
    const auto s = group_.generator(j);
    for (std::size_t i = 0; i < algebra_.dim(); ++i) {
      const Matrix& x = algebra_.basis()[i];
      const Matrix ax = act(s, x);
      if (rel_gap(act(s, Matrix(x.adjoint())), ax.adjoint()) > kAlgebraTol) {
        throw InconsistentAction("alpha does not preserve the adjoint");
      }
      for (const auto& y : algebra_.basis()) {
        if (rel_gap(act(s, x * y), ax * act(s, y)) > kAlgebraTol) throw InconsistentAction("alpha is not multiplicative");
      }
    }
  }
  if (pair_) {
    if (pair_->pi_basis.size() != algebra_.dim() || pair_->unitaries.size() != group_.size()) {
      throw InconsistentAction("covariant pair has the wrong shape");
    }
  }
}

GAlgebra GAlgebra::from_generator_maps(StarAlgebra algebra, Group group, const std::vector<Matrix>& generator_maps,
                                       std::optional<CovariantPair> pair) {
  if (generator_maps.size() != group.rank()) {
    throw std::invalid_argument("need one action map per cyclic factor (" + std::to_string(group.rank()) + ")");
  }
  const auto n = static_cast<Eigen::Index>(algebra.dim());
  std::vector<Matrix> maps(group.size());
  for (std::size_t s = 0; s < group.size(); ++s) {
    const auto e = group.element(s);
    Matrix m = Matrix::Identity(n, n);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (generator_maps[j].rows() != n || generator_maps[j].cols() != n) {
        throw std::invalid_argument("action map " + std::to_string(j) + " must be " + std::to_string(n) + "x" + std::to_string(n));
      }
      for (std::int64_t k = 0; k < e[j]; ++k) m = generator_maps[j] * m;
    }
    maps[s] = m;
  }
  return GAlgebra(std::move(algebra), std::move(group), std::move(maps), std::move(pair));
}

Matrix GAlgebra::act(std::size_t s, const Matrix& a) const {
  return algebra_.element(maps_.at(s) * algebra_.coords(a));
}

// ---------------------------------------------------------------------------------------------
// Crossed elements

CrossedElement bracket(const Matrix& xi, const Matrix& eta, const GAlgebra& act) {
  const auto& g = act.group();
  CrossedElement out(g.size());
  const Matrix xs = xi.adjoint();
  const Vector c = act.algebra().coords(eta);
  for (std::size_t t = 0; t < g.size(); ++t) out[t] = xs * act.algebra().element(act.action_map(t) * c);
  return out;
}

CrossedElement crossed_multiply(const CrossedElement& f, const CrossedElement& g, const GAlgebra& act) {
  const auto& grp = act.group();
  const auto d = act.algebra().rep_dim();
  CrossedElement out(grp.size(), Matrix::Zero(d, d));
  for (std::size_t s = 0; s < grp.size(); ++s) {
    if (f[s].isZero(0.0)) continue;
    for (std::size_t u = 0; u < grp.size(); ++u) out[grp.add(s, u)] += f[s] * act.act(s, g[u]);
  }
  return out;
}

CrossedElement crossed_adjoint(const CrossedElement& f, const GAlgebra& act) {
  const auto& grp = act.group();
  CrossedElement out(grp.size());
  for (std::size_t t = 0; t < grp.size(); ++t) out[t] = act.act(t, Matrix(f[grp.neg(t)].adjoint()));
  return out;
}

CrossedElement left_multiplier(const Matrix& a, const CrossedElement& f) {
  CrossedElement out(f.size());
  for (std::size_t t = 0; t < f.size(); ++t) out[t] = a * f[t];
  return out;
}

CrossedElement right_multiplier(const CrossedElement& f, const Matrix& b, const GAlgebra& act) {
  CrossedElement out(f.size());
  for (std::size_t t = 0; t < f.size(); ++t) out[t] = f[t] * act.act(t, b);
  return out;
}

Matrix module_action(const Matrix& xi, const CrossedElement& phi, const GAlgebra& act) {
  const auto& g = act.group();
  const auto& alg = act.algebra();
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(alg.dim()));
  for (std::size_t t = 0; t < g.size(); ++t) acc += act.action_map(t) * alg.coords(xi * phi[g.neg(t)]);
  return alg.element(acc);
}

double crossed_distance(const CrossedElement& f, const CrossedElement& g) {
  double m = 0.0;
  for (std::size_t t = 0; t < f.size(); ++t) m = std::max(m, (f[t] - g[t]).norm());
  return m;
}

// ---------------------------------------------------------------------------------------------
// Crossed product representation

CrossedRep crossed_rep(const GAlgebra& act) {
  const auto& a = act.algebra();
  const auto& grp = act.group();
  CrossedRep rep;
  if (act.supplied_pair()) {
    rep.pair = *act.supplied_pair();
  } else {
    const auto d = a.rep_dim();
    const auto n = static_cast<Eigen::Index>(grp.size());
    const auto big = d * n;
    for (const auto& b : a.basis()) {
      Matrix p = Matrix::Zero(big, big);
      for (std::size_t r = 0; r < grp.size(); ++r) {
        const auto off = static_cast<Eigen::Index>(r) * d;
        p.block(off, off, d, d) = act.act(grp.neg(r), b);
      }
      rep.pair.pi_basis.push_back(p);
    }
    for (std::size_t s = 0; s < grp.size(); ++s) {
      Matrix u = Matrix::Zero(big, big);
      for (std::size_t r = 0; r < grp.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(grp.add(r, s)) * d;
        u.block(row, static_cast<Eigen::Index>(r) * d, d, d) = Matrix::Identity(d, d);
      }
      rep.pair.unitaries.push_back(u);
    }
  }
  rep.dimension = rep.pair.unitaries.front().rows();

  // Covariance and the representation property on the basis.
  for (std::size_t s = 0; s < grp.size(); ++s) {
    const Matrix& u = rep.pair.unitaries[s];
    if (rel_gap(u * u.adjoint(), Matrix::Identity(rep.dimension, rep.dimension)) > kAlgebraTol) {
      throw InconsistentAction("U_" + std::to_string(s) + " is not unitary");
    }
    for (std::size_t t = 0; t < grp.size(); ++t) {
      if (rel_gap(u * rep.pair.unitaries[t], rep.pair.unitaries[grp.add(s, t)]) > kAlgebraTol) {
        throw InconsistentAction("U is not a homomorphism");
      }
    }
  }
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < grp.rank(); ++j) {
      const auto s = grp.generator(j);
      const Matrix lhs = rep.pair.unitaries[s] * rep.pair.pi_basis[i] * rep.pair.unitaries[s].adjoint();
      if (rel_gap(lhs, represent(rep, act, act.act(s, a.basis()[i]))) > kAlgebraTol) {
        throw InconsistentAction("covariance U_s pi(a) U_s^* = pi(alpha_s(a)) fails");
      }
    }
    for (std::size_t k = 0; k < a.dim(); ++k) {
      const Matrix prod = rep.pair.pi_basis[i] * rep.pair.pi_basis[k];
      if (rel_gap(prod, represent(rep, act, Matrix(a.basis()[i] * a.basis()[k]))) > kAlgebraTol) {
        throw InconsistentAction("pi is not multiplicative");
      }
    }
  }
  std::vector<Matrix> span;
  for (const auto& p : rep.pair.pi_basis) {
    for (const auto& u : rep.pair.unitaries) span.push_back(p * u);
  }
  rep.crossed_dim = span_dimension(span);
  rep.faithful = rep.crossed_dim == a.dim() * grp.size();
  return rep;
}

Matrix represent(const CrossedRep& rep, const GAlgebra& act, const Matrix& a) {
  const Vector c = act.algebra().coords(a);
  Matrix out = Matrix::Zero(rep.dimension, rep.dimension);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i)) > 0.0) out += c(i) * rep.pair.pi_basis[static_cast<std::size_t>(i)];
  }
  return out;
}

Matrix represent(const CrossedRep& rep, const GAlgebra& act, const CrossedElement& f) {
  Matrix out = Matrix::Zero(rep.dimension, rep.dimension);
  for (std::size_t s = 0; s < f.size(); ++s) out += represent(rep, act, f[s]) * rep.pair.unitaries[s];
  return out;
}

// ---------------------------------------------------------------------------------------------
// Finite-group properness checks

P1Report p1_check(const std::vector<Matrix>& R, const GAlgebra& act) {
  P1Report out;
  for (std::size_t i = 0; i < R.size(); ++i) {
    for (std::size_t j = 0; j < R.size(); ++j) {
      double total = 0.0;
      for (const auto& v : bracket(R[i], R[j], act)) total += operator_norm(v);
      out.pairs.push_back({i, j, total});
    }
  }
  return out;
}

Matrix fix_inner(const Matrix& xi, const Matrix& eta, const GAlgebra& act) {
  const Matrix p = xi * eta.adjoint();
  // Summing in coordinates keeps a single projection.
  const Vector c = act.algebra().coords(p);
  Vector acc = Vector::Zero(c.size());
  for (std::size_t t = 0; t < act.group().size(); ++t) acc += act.action_map(t) * c;
  return act.algebra().element(acc);
}

std::vector<Matrix> build_R_tilde(const std::vector<Matrix>& R, const GAlgebra& act) {
  const auto d = act.algebra().rep_dim();
  SpanBuilder span(d * d);
  for (const auto& xi : R) {
    for (const auto& b : act.algebra().basis()) {
      const Matrix x = xi * b;
      for (std::size_t s = 0; s < act.group().size(); ++s) span.add(flatten(act.act(s, x)));
      if (span.dimension() == act.algebra().dim()) return orthonormal_mats(span, d);
    }
  }
  return orthonormal_mats(span, d);
}

std::vector<Matrix> build_A0(const std::vector<Matrix>& R, const GAlgebra& act) {
  const auto rt = build_R_tilde(R, act);
  const auto d = act.algebra().rep_dim();
  SpanBuilder span(d * d);
  for (const auto& x : rt) {
    for (const auto& y : rt) span.add(flatten(x * y.adjoint()));
  }
  return orthonormal_mats(span, d);
}

GramReport gram_positivity(const std::vector<Matrix>& R, const GAlgebra& act) {
  GramReport out;
  if (R.empty()) return out;
  const auto rep = crossed_rep(act);
  const auto D = rep.dimension;
  const auto n = static_cast<Eigen::Index>(R.size());
  Matrix gram(n * D, n * D);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram.block(i * D, j * D, D, D) = represent(rep, act, bracket(R[i], R[j], act));
    }
  }
  const Matrix herm = (gram + gram.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

SaturationReport saturation_check(const std::vector<Matrix>& R, const GAlgebra& act) {
  SaturationReport out;
  out.full_dim = act.algebra().dim() * act.group().size();
  if (R.empty()) return out;
  const auto rep = crossed_rep(act);
  out.ideal_dim = bracket_ideal_dim(R, act, rep);
  out.saturated = out.ideal_dim == out.full_dim;
  return out;
}

FixedPointReport fixed_point_algebra(const std::vector<Matrix>& R, const GAlgebra& act, std::uint64_t seed) {
  FixedPointReport out;
  const auto rt = build_R_tilde(R, act);
  const auto d = act.algebra().rep_dim();
  SpanBuilder span(d * d);
  for (const auto& x : rt) {
    for (const auto& y : rt) span.add(flatten(fix_inner(x, y, act)));
  }
  out.generators = orthonormal_mats(span, d);
  out.dimension = out.generators.size();
  if (out.generators.empty()) return out;
  const auto& grp = act.group();
  for (const auto& m : out.generators) {
    for (std::size_t t = 0; t < grp.size(); ++t) {
      out.fixedness_defect = std::max(out.fixedness_defect, (act.act(t, m) - m).norm() / m.norm());
    }
    if (!span.contains(flatten(Matrix(m.adjoint())))) throw InconsistentAlgebra("fixed-point span is not closed under adjoints");
    for (const auto& k : out.generators) {
      if (!span.contains(flatten(Matrix(m * k)))) throw InconsistentAlgebra("fixed-point span is not closed under products");
    }
  }
  if (out.fixedness_defect > 1e-10) throw InconsistentAlgebra("fixed-point span is not G-invariant");
  out.blocks = wedderburn_blocks(out.generators, out.generators, seed).blocks;
  return out;
}

ModuleEquivalenceReport module_equivalence_check(const std::vector<Matrix>& R, const GAlgebra& act,
                                                 std::uint64_t seed) {
  ModuleEquivalenceReport out;
  const auto rep = crossed_rep(act);
  const auto rt = build_R_tilde(R, act);
  const auto a0 = build_A0(R, act);
  out.ideal_dim_R = R.empty() ? 0 : bracket_ideal_dim(R, act, rep);
  out.ideal_dim_R_tilde = rt.empty() ? 0 : bracket_ideal_dim(rt, act, rep);
  out.ideal_dim_A0 = a0.empty() ? 0 : bracket_ideal_dim(a0, act, rep);

  if (!rt.empty()) {
    std::mt19937_64 rng(seed);
    const auto& alg = act.algebra();
    const auto d = alg.rep_dim();
    for (int trial = 0; trial < 4; ++trial) {
      const Matrix xi = random_in_span(rt, d, rng);
      const Matrix eta = random_in_span(rt, d, rng);
      CrossedElement f(act.group().size());
      CrossedElement g(act.group().size());
      for (auto& v : f) v = random_element(alg, rng);
      for (auto& v : g) v = random_element(alg, rng);
      const Matrix a = random_element(alg, rng);
      const Matrix b = random_element(alg, rng);
      const auto base = bracket(xi, eta, act);

      const auto lhs1 = bracket(module_action(xi, f, act), module_action(eta, g, act), act);
      const auto rhs1 = crossed_multiply(crossed_multiply(crossed_adjoint(f, act), base, act), g, act);
      const auto lhs2 = bracket(xi * a, eta * b, act);
      const auto rhs2 = left_multiplier(a.adjoint(), right_multiplier(base, b, act));
      double scale1 = 1.0;
      double scale2 = 1.0;
      for (const auto& v : rhs1) scale1 = std::max(scale1, v.norm());
      for (const auto& v : rhs2) scale2 = std::max(scale2, v.norm());
      out.formula_defect = std::max({out.formula_defect, crossed_distance(lhs1, rhs1) / scale1,
                                     crossed_distance(lhs2, rhs2) / scale2});
    }
  }
  out.equivalent = out.ideal_dim_R == out.ideal_dim_R_tilde && out.ideal_dim_R == out.ideal_dim_A0 &&
                   out.formula_defect < 1e-10;
  return out;
}

double imprimitivity_check(const std::vector<Matrix>& R, const GAlgebra& act) {
  const auto n = R.size();
  std::vector<Matrix> fix(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) fix[i * n + j] = fix_inner(R[i], R[j], act);
  }
  double defect = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto b = bracket(R[j], R[k], act);
      for (std::size_t i = 0; i < n; ++i) {
        defect = std::max(defect, (fix[i * n + j] * R[k] - module_action(R[i], b, act)).norm());
      }
    }
  }
  return defect;
}

// ---------------------------------------------------------------------------------------------
// Corollaries at finite scale

std::vector<Matrix> induce_via_morphism(const Matrix& phi, const GAlgebra& a, const GAlgebra& b,
                                        const std::vector<Matrix>& R_A) {
  const auto& A = a.algebra();
  const auto& B = b.algebra();
  if (a.group() != b.group()) throw std::invalid_argument("morphism must intertwine actions of the same group");
  if (phi.rows() != static_cast<Eigen::Index>(B.dim()) || phi.cols() != static_cast<Eigen::Index>(A.dim())) {
    throw std::invalid_argument("morphism matrix must be dim(B) x dim(A)");
  }
  auto map = [&](const Matrix& x) { return B.element(phi * A.coords(x)); };
  for (const auto& x : A.basis()) {
    const Matrix px = map(x);
    if (rel_gap(map(Matrix(x.adjoint())), px.adjoint()) > kAlgebraTol) throw std::invalid_argument("morphism does not preserve adjoints");
    for (const auto& y : A.basis()) {
      if (rel_gap(map(x * y), px * map(y)) > kAlgebraTol) throw std::invalid_argument("morphism is not multiplicative");
    }
  }
  for (std::size_t s = 0; s < a.group().size(); ++s) {
    if (rel_gap(phi * a.action_map(s), b.action_map(s) * phi) > kAlgebraTol) {
      throw std::invalid_argument("morphism is not equivariant at group element " + std::to_string(s));
    }
  }
  const auto d = B.rep_dim();
  SpanBuilder nondeg(d * d);
  for (const auto& x : A.basis()) {
    const Matrix px = map(x);
    for (const auto& y : B.basis()) nondeg.add(flatten(px * y));
  }
  if (nondeg.dimension() < B.dim()) {
    throw std::invalid_argument("morphism is degenerate: span Phi(A)B has dimension " + std::to_string(nondeg.dimension()) +
                                " < dim B = " + std::to_string(B.dim()));
  }
  SpanBuilder out(d * d);
  for (const auto& xi : R_A) {
    const Matrix px = map(xi);
    for (const auto& y : B.basis()) out.add(flatten(px * y));
  }
  return orthonormal_mats(out, d);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

GAlgebra tensor_action(const GAlgebra& a, const GAlgebra& b) {
  std::vector<Matrix> basis;
  for (const auto& x : a.algebra().basis()) {
    for (const auto& y : b.algebra().basis()) basis.push_back(kron(x, y));
  }
  auto alg = StarAlgebra::from_basis(std::move(basis));
  const auto grp = product(a.group(), b.group());
  std::vector<Matrix> maps;
  maps.reserve(grp.size());
  for (std::size_t g = 0; g < a.group().size(); ++g) {
    for (std::size_t h = 0; h < b.group().size(); ++h) maps.push_back(kron(a.action_map(g), b.action_map(h)));
  }
  std::optional<CovariantPair> pair;
  if (a.supplied_pair() && b.supplied_pair()) {
    CovariantPair p;
    for (const auto& x : a.supplied_pair()->pi_basis) {
      for (const auto& y : b.supplied_pair()->pi_basis) p.pi_basis.push_back(kron(x, y));
    }
    for (const auto& u : a.supplied_pair()->unitaries) {
      for (const auto& v : b.supplied_pair()->unitaries) p.unitaries.push_back(kron(u, v));
    }
    pair = std::move(p);
  }
  return GAlgebra(std::move(alg), grp, std::move(maps), std::move(pair));
}

GAlgebra inflate_action(const GAlgebra& quotient_action, const Group& g, const std::vector<std::size_t>& q) {
  const auto& qg = quotient_action.group();
  if (q.size() != g.size()) throw std::invalid_argument("quotient map needs one image per group element");
  std::vector<bool> hit(qg.size(), false);
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (q[s] >= qg.size()) throw std::invalid_argument("quotient map image out of range");
    hit[q[s]] = true;
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (q[g.add(s, t)] != qg.add(q[s], q[t])) throw std::invalid_argument("quotient map is not a homomorphism");
    }
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) throw std::invalid_argument("quotient map is not surjective");
  std::vector<Matrix> maps;
  maps.reserve(g.size());
  for (std::size_t s = 0; s < g.size(); ++s) maps.push_back(quotient_action.action_map(q[s]));
  return GAlgebra(quotient_action.algebra(), g, std::move(maps));
}

std::vector<std::size_t> reduction_map(const Group& g, const Group& quotient) {
  if (g.rank() != quotient.rank()) throw std::invalid_argument("reduction needs groups of equal rank");
  for (std::size_t j = 0; j < g.rank(); ++j) {
    if (g.orders()[j] % quotient.orders()[j] != 0) throw std::invalid_argument("quotient orders must divide the group orders");
  }
  std::vector<std::size_t> q(g.size());
  for (std::size_t s = 0; s < g.size(); ++s) {
    auto e = g.element(s);
    for (std::size_t j = 0; j < e.size(); ++j) e[j] %= quotient.orders()[j];
    q[s] = quotient.index(e);
  }
  return q;
}

// ---------------------------------------------------------------------------------------------
// Lattice shift model

namespace {

struct Box {
  int rank;
  int radius;
  std::size_t size;
  std::vector<std::int64_t> strides;
};

Box make_box(int rank, int radius) {
  Box b{rank, radius, 1, std::vector<std::int64_t>(static_cast<std::size_t>(rank))};
  const auto side = static_cast<std::int64_t>(2 * radius + 1);
  for (int j = rank - 1; j >= 0; --j) {
    b.strides[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(b.size);
    b.size *= static_cast<std::size_t>(side);
  }
  return b;
}

Element box_point(const Box& b, std::size_t idx) {
  Element e(static_cast<std::size_t>(b.rank));
  const auto side = static_cast<std::size_t>(2 * b.radius + 1);
  for (int j = b.rank - 1; j >= 0; --j) {
    e[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(idx % side) - b.radius;
    idx /= side;
  }
  return e;
}

std::int64_t box_offset(const Box& b, const Element& e) {
  std::int64_t off = 0;
  for (std::size_t j = 0; j < e.size(); ++j) off += (e[j] + b.radius) * b.strides[j];
  return off;
}

std::int64_t linf(const Element& e) {
  std::int64_t m = 0;
  for (auto v : e) m = std::max<std::int64_t>(m, v < 0 ? -v : v);
  return m;
}

std::vector<int> checked_windows(const std::vector<int>& windows) {
  if (windows.empty()) throw std::invalid_argument("window schedule is empty");
  auto w = windows;
  for (int r : w) {
    if (r < 1) throw std::invalid_argument("window radii must be positive");
  }
  if (!std::is_sorted(w.begin(), w.end()) || std::adjacent_find(w.begin(), w.end()) != w.end()) {
    throw std::invalid_argument("window radii must be strictly increasing");
  }
  return w;
}

// Generator samples on the box of radius 3 R_max, which contains every m - t with
// |m| <= R_max and |t| <= 2 R_max.
std::vector<std::vector<Complex>> sample_generators(const ShiftModel& model, const Box& big) {
  std::vector<std::vector<Complex>> vals(model.generators.size(), std::vector<Complex>(big.size));
  for (std::size_t g = 0; g < model.generators.size(); ++g) {
    for (std::size_t i = 0; i < big.size; ++i) vals[g][i] = model.generators[g](box_point(big, i));
  }
  return vals;
}

}  // namespace

std::vector<int> default_windows() { return {2, 4, 8, 16, 32, 64}; }

LatticeP1Report p1_check(const ShiftModel& model, const std::vector<int>& windows, double tol) {
  if (model.rank < 1) throw std::invalid_argument("shift model rank must be positive");
  LatticeP1Report out;
  out.windows = checked_windows(windows);
  const int rmax = out.windows.back();
  const int horizon = 2 * rmax;
  const Box obs = make_box(model.rank, rmax);
  const Box shifts = make_box(model.rank, horizon);
  const Box big = make_box(model.rank, 3 * rmax);
  const auto vals = sample_generators(model, big);
  std::vector<std::int64_t> obs_off(obs.size);
  for (std::size_t i = 0; i < obs.size; ++i) obs_off[i] = box_offset(big, box_point(obs, i));
  std::vector<std::int64_t> shift_off(shifts.size);
  std::vector<std::int64_t> shift_norm(shifts.size);
  for (std::size_t i = 0; i < shifts.size; ++i) {
    const auto t = box_point(shifts, i);
    shift_off[i] = box_offset(big, t) - box_offset(big, Element(t.size(), 0));
    shift_norm[i] = linf(t);
  }
  out.passed = true;
  const auto n = model.generators.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // ||xi^* alpha_t(eta)|| = sup_m |xi(m)| |eta(m - t)|, grouped by |t|_inf.
      std::vector<double> shell(static_cast<std::size_t>(horizon) + 1, 0.0);
      for (std::size_t k = 0; k < shifts.size; ++k) {
        double sup = 0.0;
        for (std::size_t m = 0; m < obs.size; ++m) {
          const double v = std::abs(vals[i][static_cast<std::size_t>(obs_off[m])]) *
                           std::abs(vals[j][static_cast<std::size_t>(obs_off[m] - shift_off[k])]);
          sup = std::max(sup, v);
        }
        shell[static_cast<std::size_t>(shift_norm[k])] += sup;
      }
      LatticePairTails pt{i, j, {}, {}, false, true};
      for (int r : out.windows) {
        double total = 0.0;
        double tail = 0.0;
        for (int s = 0; s <= horizon; ++s) (s <= r ? total : tail) += shell[static_cast<std::size_t>(s)];
        if (!pt.tails.empty() && tail > pt.tails.back() * (1.0 + 1e-12)) pt.monotone = false;
        pt.totals.push_back(total);
        pt.tails.push_back(tail);
      }
      pt.passed = pt.tails.back() < tol;
      if (!pt.monotone) {
        out.warnings.push_back("nonmonotone tails for pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      out.passed = out.passed && pt.passed;
      out.pairs.push_back(std::move(pt));
    }
  }
  return out;
}

LatticeFixInner fix_inner(const ShiftModel& model, std::size_t i, std::size_t j, const std::vector<int>& windows,
                          double tol) {
  const auto w = checked_windows(windows);
  if (i >= model.generators.size() || j >= model.generators.size()) throw std::invalid_argument("generator index out of range");
  const int rmax = w.back();
  const Box obs = make_box(model.rank, rmax);
  const Box big = make_box(model.rank, 3 * rmax);
  const auto vals = sample_generators(model, big);
  std::vector<std::int64_t> obs_off(obs.size);
  for (std::size_t m = 0; m < obs.size; ++m) obs_off[m] = box_offset(big, box_point(obs, m));
  const auto origin = box_offset(big, Element(static_cast<std::size_t>(model.rank), 0));

  // S_K(m) = sum_{|t| <= K} xi(m - t) conj(eta(m - t)), accumulated shell by shell.
  std::vector<Complex> partial(obs.size, Complex(0.0));
  std::vector<Complex> previous;
  LatticeFixInner out;
  out.radius = rmax;
  const Box shifts = make_box(model.rank, rmax);
  std::vector<std::pair<std::int64_t, std::int64_t>> by_norm;  // (|t|, offset)
  for (std::size_t k = 0; k < shifts.size; ++k) {
    const auto t = box_point(shifts, k);
    by_norm.emplace_back(linf(t), box_offset(big, t) - origin);
  }
  std::sort(by_norm.begin(), by_norm.end());
  std::size_t cursor = 0;
  for (std::size_t wi = 0; wi < w.size(); ++wi) {
    while (cursor < by_norm.size() && by_norm[cursor].first <= w[wi]) {
      const auto off = by_norm[cursor++].second;
      for (std::size_t m = 0; m < obs.size; ++m) {
        const auto idx = static_cast<std::size_t>(obs_off[m] - off);
        partial[m] += vals[i][idx] * std::conj(vals[j][idx]);
      }
    }
    if (wi + 1 == w.size() && !previous.empty()) {
      // Strict-convergence monitor on the last pair of consecutive windows.
      for (std::size_t b = 0; b < model.generators.size(); ++b) {
        double worst = 0.0;
        for (std::size_t m = 0; m < obs.size; ++m) {
          const double bm = std::abs(vals[b][static_cast<std::size_t>(obs_off[m])]);
          worst = std::max(worst, bm * bm * std::abs(partial[m] - previous[m]));
        }
        out.monitor = std::max(out.monitor, worst);
        if (!(worst < tol)) {
          throw NotStrictlyConvergent("b^*(S_K - S_K')b did not settle below " + std::to_string(tol) + " (value " +
                                          std::to_string(worst) + ")",
                                      b);
        }
      }
    }
    previous = partial;
  }
  out.values = std::move(partial);
  return out;
}

}  // namespace twistfix
