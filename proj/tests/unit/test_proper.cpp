#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/generators.hpp"
#include "twistfix/errors.hpp"
#include "twistfix/presets.hpp"
#include "twistfix/proper.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace twistfix;

namespace {

Matrix diag2(Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Dimension of the classical fixed subspace {a : alpha_s(a) = a for all s}, from the action maps.
std::size_t fixed_subspace_dim(const GAlgebra& act) {
  const auto n = static_cast<Eigen::Index>(act.algebra().dim());
  const auto& g = act.group();
  Matrix stacked(n * static_cast<Eigen::Index>(g.size()), n);
  for (std::size_t s = 0; s < g.size(); ++s) {
    stacked.middleRows(static_cast<Eigen::Index>(s) * n, n) = act.action_map(s) - Matrix::Identity(n, n);
  }
  Eigen::FullPivLU<Matrix> lu(stacked);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(n - lu.rank());
}

/// Rank by LU, independent of the library's span machinery.
std::size_t lu_rank(const std::vector<Matrix>& mats) {
  if (mats.empty()) return 0;
  Matrix cols(mats.front().size(), static_cast<Eigen::Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i) {
    cols.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(mats[i].data(), mats[i].size());
  }
  Eigen::FullPivLU<Matrix> lu(cols);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(lu.rank());
}

Element concat(const Element& a, const Element& b) {
  Element out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

TEST_CASE("bracket values") {
  const auto swap = make_preset("swap");
  const Matrix xi = diag2(1.0, 0.0);
  const auto b = bracket(xi, xi, swap.action);
  REQUIRE(b.size() == 2);
  CHECK(max_abs(b[0] - diag2(1.0, 0.0)) == 0.0);
  CHECK(max_abs(b[1]) == 0.0);
  const auto zero = bracket(Matrix::Zero(2, 2), xi, swap.action);
  for (const auto& v : zero) CHECK(max_abs(v) == 0.0);

  const auto triv = make_preset("trivial:Z3:2");
  testgen::Gen gen(81);
  const Matrix x = gen.matrix(2, 2);
  const Matrix y = gen.matrix(2, 2);
  for (const auto& v : bracket(x, y, triv.action)) CHECK(max_abs(v - x.adjoint() * y) < 1e-14);
}

TEST_CASE("bracket is conjugate symmetric under the crossed-product involution (property)") {
  testgen::Gen gen(83);
  for (const char* spec : {"swap", "dual:Z3", "dual:Z2xZ2:std", "inner:Z2"}) {
    const auto p = make_preset(spec);
    const auto d = p.action.algebra().rep_dim();
    for (int trial = 0; trial < 5; ++trial) {
      const Vector cx = gen.matrix(static_cast<Eigen::Index>(p.action.algebra().dim()), 1);
      const Vector cy = gen.matrix(static_cast<Eigen::Index>(p.action.algebra().dim()), 1);
      const Matrix x = p.action.algebra().element(cx);
      const Matrix y = p.action.algebra().element(cy);
      REQUIRE(x.rows() == d);
      CHECK(crossed_distance(crossed_adjoint(bracket(x, y, p.action), p.action), bracket(y, x, p.action)) < 1e-12);
    }
  }
}

TEST_CASE("crossed-product algebra laws (property)") {
  testgen::Gen gen(89);
  const auto p = make_preset("dual:Z2xZ2:std");
  const auto& act = p.action;
  const auto n = static_cast<Eigen::Index>(act.algebra().dim());
  auto random_crossed = [&] {
    CrossedElement f;
    for (std::size_t s = 0; s < act.group().size(); ++s) f.push_back(act.algebra().element(gen.matrix(n, 1)));
    return f;
  };
  const auto rep = crossed_rep(act);
  CHECK(rep.faithful);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_crossed();
    const auto g = random_crossed();
    const auto h = random_crossed();
    CHECK(crossed_distance(crossed_multiply(crossed_multiply(f, g, act), h, act),
                           crossed_multiply(f, crossed_multiply(g, h, act), act)) < 1e-11);
    CHECK(max_abs(represent(rep, act, crossed_multiply(f, g, act)) - represent(rep, act, f) * represent(rep, act, g)) < 1e-11);
    CHECK(max_abs(represent(rep, act, crossed_adjoint(f, act)) - represent(rep, act, f).adjoint()) < 1e-12);
  }
}

TEST_CASE("p1 on finite groups sums exactly") {
  const auto swap = make_preset("swap");
  const auto report = p1_check(swap.R, swap.action);
  CHECK(report.passed);
  // R = {E_00, E_11}: xi^* alpha_t(eta) is nonzero for exactly one t per pair, with norm 1.
  for (const auto& pair : report.pairs) CHECK(std::abs(pair.total - 1.0) < 1e-15);
}

TEST_CASE("fix_inner examples") {
  SUBCASE("trivial action gives |G| xi eta^*") {
    const auto p = make_preset("trivial:Z3:2");
    testgen::Gen gen(97);
    const Matrix x = gen.matrix(2, 2);
    const Matrix y = gen.matrix(2, 2);
    CHECK(max_abs(fix_inner(x, y, p.action) - 3.0 * x * y.adjoint()) < 1e-14);
  }
  SUBCASE("swap of C + C sends (1,0) to the unit") {
    const auto p = make_preset("swap");
    CHECK(max_abs(fix_inner(diag2(1.0, 0.0), diag2(1.0, 0.0), p.action) - Matrix::Identity(2, 2)) < 1e-15);
  }
  SUBCASE("dual action of Z2 on C[Z2] doubles delta_0") {
    const auto p = make_preset("dual:Z2");
    const Matrix d0 = p.action.algebra().basis()[0];
    CHECK(max_abs(fix_inner(d0, d0, p.action) - 2.0 * d0) < 1e-15);
  }
}

TEST_CASE("fix_inner lands in the fixed subspace and is Hermitian (property)") {
  testgen::Gen gen(101);
  for (const char* spec : {"swap", "dual:Z4", "dual:Z2xZ2:std", "inner:Z2", "trivial:Z2:2"}) {
    const auto p = make_preset(spec);
    const auto& act = p.action;
    const auto n = static_cast<Eigen::Index>(act.algebra().dim());
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix x = act.algebra().element(gen.matrix(n, 1));
      const Matrix y = act.algebra().element(gen.matrix(n, 1));
      const Matrix f = fix_inner(x, y, act);
      for (std::size_t t = 0; t < act.group().size(); ++t) CHECK(max_abs(act.act(t, f) - f) < 1e-10);
      CHECK(max_abs(f.adjoint() - fix_inner(y, x, act)) < 1e-12);
    }
  }
}

TEST_CASE("A0 and R tilde") {
  const auto swap = make_preset("swap");
  const std::vector<Matrix> R{diag2(1.0, 0.0)};
  CHECK(build_R_tilde(R, swap.action).size() == 2);
  CHECK(build_A0(R, swap.action).size() == 2);
  const auto triv = make_preset("trivial:Z2:1");
  CHECK(build_A0({Matrix::Identity(1, 1)}, triv.action).size() == 1);
  const auto dual = make_preset("dual:Z2xZ2:std");
  CHECK(build_A0(dual.R, dual.action).size() == dual.action.algebra().dim());
}

TEST_CASE("crossed representations") {
  const auto triv1 = make_preset("trivial:Z1:2");
  const auto r1 = crossed_rep(triv1.action);
  CHECK(r1.crossed_dim == 4);
  CHECK(r1.faithful);
  const auto c = make_preset("trivial:Z2:1");
  CHECK(crossed_rep(c.action).crossed_dim == 2);
  const auto dual = make_preset("dual:Z2");
  const auto rep = crossed_rep(dual.action);
  CHECK(rep.crossed_dim == 4);
  // Covariance: U_s pi(a) U_s^* = pi(alpha_s(a)).
  for (std::size_t s = 0; s < 2; ++s) {
    for (const auto& b : dual.action.algebra().basis()) {
      const Matrix lhs = rep.pair.unitaries[s] * represent(rep, dual.action, b) * rep.pair.unitaries[s].adjoint();
      CHECK(max_abs(lhs - represent(rep, dual.action, dual.action.act(s, b))) < 1e-12);
    }
  }
}

TEST_CASE("Gram positivity") {
  const auto swap = make_preset("swap");
  const auto g = gram_positivity(swap.R, swap.action);
  CHECK(std::abs(g.min_eigenvalue) < 1e-12);
  const auto triv = make_preset("trivial:Z3:1");
  const auto t = gram_positivity({Matrix::Identity(1, 1) * 2.0}, triv.action);
  CHECK(t.min_eigenvalue >= -1e-12);
  // Rank-one structure: the Gram of a single constant generator is 4 (1 + U + U^2) with norm 12.
  CHECK(std::abs(t.norm - 12.0) < 1e-10);
  testgen::Gen gen(103);
  for (const char* spec : {"dual:Z3", "dual:Z2xZ2:std", "inner:Z2"}) {
    const auto p = make_preset(spec);
    const auto n = static_cast<Eigen::Index>(p.action.algebra().dim());
    std::vector<Matrix> R;
    for (int i = 0; i < 3; ++i) R.push_back(p.action.algebra().element(gen.matrix(n, 1)));
    const auto r = gram_positivity(R, p.action);
    CHECK(r.min_eigenvalue >= -1e-10 * r.norm);
  }
}

TEST_CASE("saturation") {
  for (const char* spec : {"dual:Z2", "dual:Z3", "dual:Z2xZ2:std", "dual:Z4xZ4:std", "dual:Z2xZ3"}) {
    const auto p = make_preset(spec);
    const auto s = saturation_check(p.R, p.action);
    const auto order = p.action.group().size();
    CHECK(s.saturated);
    CHECK(s.ideal_dim == order * order);
  }
  SUBCASE("trivial action of Z2 on C generates a one-dimensional ideal") {
    // Oracle: brackets are the constant function 1, i.e. 1 + lambda in C[Z2]; the ideal it
    // generates is the span of (1 + lambda) x, which is the trivial-character line.
    Matrix lambda(2, 2);
    lambda << 0, 1, 1, 0;
    const Matrix one_plus = Matrix::Identity(2, 2) + lambda;
    CHECK(lu_rank({one_plus, one_plus * lambda}) == 1);
    const auto p = make_preset("trivial:Z2:1");
    const auto s = saturation_check(p.R, p.action);
    CHECK_FALSE(s.saturated);
    CHECK(s.ideal_dim == 1);
    CHECK(s.full_dim == 2);
  }
  SUBCASE("zero generator") {
    const auto p = make_preset("swap");
    const auto s = saturation_check({Matrix::Zero(2, 2)}, p.action);
    CHECK_FALSE(s.saturated);
    CHECK(s.ideal_dim == 0);
  }
}

TEST_CASE("fixed-point algebras") {
  const auto swap = make_preset("swap");
  const auto fs = fixed_point_algebra(swap.R, swap.action);
  CHECK(fs.blocks == std::vector<int>{1});
  CHECK(fs.dimension == fixed_subspace_dim(swap.action));
  const auto dual = make_preset("dual:Z4xZ4:std");
  CHECK(fixed_point_algebra(dual.R, dual.action).blocks == std::vector<int>{1});
  const auto triv = make_preset("trivial:Z2:2");
  const auto ft = fixed_point_algebra(triv.R, triv.action);
  CHECK(ft.blocks == std::vector<int>{2});
  CHECK(ft.dimension == fixed_subspace_dim(triv.action));
  const auto inner = make_preset("inner:Z2");
  const auto fi = fixed_point_algebra(inner.R, inner.action);
  CHECK(fi.blocks == std::vector<int>{1, 1});
  CHECK(fi.dimension == fixed_subspace_dim(inner.action));
  CHECK(fi.fixedness_defect < 1e-12);
}

TEST_CASE("module equivalence and imprimitivity") {
  for (const char* spec : {"swap", "dual:Z2", "dual:Z3", "dual:Z2xZ2:std", "inner:Z2", "trivial:Z1:1", "trivial:Z2:2"}) {
    const auto p = make_preset(spec);
    const auto m = module_equivalence_check(p.R, p.action);
    CHECK(m.equivalent);
    CHECK(m.ideal_dim_R == m.ideal_dim_R_tilde);
    CHECK(m.ideal_dim_R == m.ideal_dim_A0);
    CHECK(m.formula_defect < 1e-10);
    CHECK(imprimitivity_check(p.R, p.action) < 1e-12);
  }
  const auto swap = make_preset("swap");
  const auto z = module_equivalence_check({Matrix::Zero(2, 2)}, swap.action);
  CHECK(z.ideal_dim_R == 0);
  CHECK(z.ideal_dim_R_tilde == 0);
  CHECK(z.ideal_dim_A0 == 0);
}

TEST_CASE("induction along morphisms") {
  SUBCASE("identity morphism") {
    const auto p = make_preset("swap");
    const auto n = static_cast<Eigen::Index>(p.action.algebra().dim());
    const auto RB = induce_via_morphism(Matrix::Identity(n, n), p.action, p.action, {diag2(1.0, 0.0)});
    CHECK(lu_rank(RB) == 1);
    CHECK(p1_check(RB, p.action).passed);
  }
  SUBCASE("regular representation of C[Z2] into M2 with the dual action") {
    const auto a = make_preset("dual:Z2");
    const auto b = make_preset("inner:Z2");
    const auto na = static_cast<Eigen::Index>(a.action.algebra().dim());
    const auto nb = static_cast<Eigen::Index>(b.action.algebra().dim());
    Matrix phi(nb, na);
    for (Eigen::Index i = 0; i < na; ++i) phi.col(i) = b.action.algebra().coords(a.action.algebra().basis()[static_cast<std::size_t>(i)]);
    const auto RB = induce_via_morphism(phi, a.action, b.action, a.R);
    CHECK(lu_rank(RB) == 4);
    CHECK(p1_check(RB, b.action).passed);
    // Oracle: the classical fixed algebra of Ad diag(1, -1) on M2 is the diagonal, C + C.
    CHECK(fixed_subspace_dim(b.action) == 2);
    CHECK(fixed_point_algebra(RB, b.action).blocks == std::vector<int>{1, 1});
  }
  SUBCASE("degenerate morphisms are rejected") {
    const auto a = make_preset("trivial:Z2:1");
    const auto b = make_preset("trivial:Z2:2");
    Matrix phi = Matrix::Zero(4, 1);
    phi(0, 0) = 1.0;  // C -> E_00 is multiplicative but not unital, so Phi(A) B is not all of B
    CHECK_THROWS_AS(induce_via_morphism(phi, a.action, b.action, {Matrix::Identity(1, 1)}), std::invalid_argument);
  }
}

TEST_CASE("tensor products") {
  const auto s = make_preset("swap");
  const auto ss = tensor_preset(s, s);
  CHECK(ss.action.group().size() == 4);
  CHECK(ss.action.algebra().dim() == 4);
  // Fixed algebra of the product action equals the tensor of the two fixed algebras (C (x) C).
  CHECK(fixed_point_algebra(ss.R, ss.action).blocks == std::vector<int>{1});
  CHECK(fixed_subspace_dim(ss.action) == fixed_subspace_dim(s.action) * fixed_subspace_dim(s.action));
  CHECK(p1_check(ss.R, ss.action).passed);

  // Brackets factorize.
  const auto a = make_preset("dual:Z2");
  const auto b = make_preset("dual:Z3");
  const auto ab = tensor_action(a.action, b.action);
  testgen::Gen gen(107);
  const Matrix x1 = a.action.algebra().element(gen.matrix(2, 1));
  const Matrix x2 = a.action.algebra().element(gen.matrix(2, 1));
  const Matrix y1 = b.action.algebra().element(gen.matrix(3, 1));
  const Matrix y2 = b.action.algebra().element(gen.matrix(3, 1));
  const auto lhs = bracket(kron(x1, y1), kron(x2, y2), ab);
  const auto bx = bracket(x1, x2, a.action);
  const auto by = bracket(y1, y2, b.action);
  const auto& G = a.action.group();
  const auto& H = b.action.group();
  for (std::size_t s1 = 0; s1 < G.size(); ++s1) {
    for (std::size_t h1 = 0; h1 < H.size(); ++h1) {
      const auto idx = ab.group().index(concat(G.element(s1), H.element(h1)));
      CHECK(max_abs(lhs[idx] - kron(bx[s1], by[h1])) < 1e-12);
    }
  }
  // C[Z2] (x) C[Z3] and C[Z6] are both commutative of dimension 6.
  const auto z6 = make_preset("dual:Z6");
  const auto t = tensor_preset(a, b);
  CHECK(wedderburn_blocks(t.action.algebra().basis(), t.action.algebra().basis()).blocks == std::vector<int>(6, 1));
  CHECK(wedderburn_blocks(z6.action.algebra().basis(), z6.action.algebra().basis()).blocks == std::vector<int>(6, 1));
  CHECK(fixed_point_algebra(t.R, t.action).blocks == std::vector<int>{1});
}

TEST_CASE("inflation multiplies l1 totals by |N|") {
  const auto s = make_preset("swap");
  const auto base = p1_check(s.R, s.action);
  const auto same = inflate_preset(s, Group::finite({2}));
  const auto same_p1 = p1_check(same.R, same.action);
  const auto z4 = inflate_preset(s, Group::finite({4}));
  const auto z4_p1 = p1_check(z4.R, z4.action);
  REQUIRE(base.pairs.size() == z4_p1.pairs.size());
  for (std::size_t i = 0; i < base.pairs.size(); ++i) {
    CHECK(std::abs(same_p1.pairs[i].total - base.pairs[i].total) < 1e-14);
    CHECK(std::abs(z4_p1.pairs[i].total - 2.0 * base.pairs[i].total) < 1e-14);
  }
  CHECK_THROWS_AS(inflate_action(s.action, Group::finite({3}), {0, 1, 0}), std::invalid_argument);
  const auto q = reduction_map(Group::finite({4}), Group::finite({2}));
  CHECK(q == std::vector<std::size_t>{0, 1, 0, 1});
}

TEST_CASE("inconsistent actions are rejected") {
  auto alg = StarAlgebra::matrix_blocks({1, 1});
  Matrix bad = Matrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(GAlgebra::from_generator_maps(alg, Group::finite({2}), {bad}), InconsistentAction);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK_THROWS_AS(GAlgebra::from_generator_maps(alg, Group::finite({3}), {swap}), InconsistentAction);
}

TEST_CASE("lattice shift models") {
  const auto geometric = [](const Element& m) {
    double s = 0.0;
    for (auto v : m) s += std::abs(static_cast<double>(v));
    return Complex(std::pow(0.5, s));
  };
  const auto constant = [](const Element&) { return Complex(1.0); };
  SUBCASE("geometric generators decay geometrically") {
    const ShiftModel model{1, {geometric}};
    const auto report = p1_check(model, {4, 8, 16, 32}, 1e-9);
    CHECK(report.passed);
    const auto& tails = report.pairs.front().tails;
    // sup_m 2^{-|m|} 2^{-|m - t|} = 2^{-|t|}: the tail beyond R is 2 sum_{s > R} 2^{-s} up to the horizon.
    for (std::size_t i = 0; i < report.windows.size(); ++i) {
      const int r = report.windows[i];
      double oracle = 0.0;
      for (int s = r + 1; s <= 64; ++s) oracle += 2.0 * std::pow(0.5, s);
      CHECK(std::abs(tails[i] - oracle) < 1e-14);
    }
    const auto fi = fix_inner(model, 0, 0, {4, 8, 16, 32}, 1e-9);
    // sum_t 4^{-|m - t|} -> 5/3 at the centre of the observation box.
    CHECK(std::abs(fi.values[fi.values.size() / 2] - 5.0 / 3.0) < 1e-9);
  }
  SUBCASE("constant generators fail") {
    const ShiftModel model{1, {constant}};
    CHECK_FALSE(p1_check(model, {2, 4, 8}, 1e-9).passed);
    CHECK_THROWS_AS(fix_inner(model, 0, 0, {2, 4, 8}, 1e-9), NotStrictlyConvergent);
  }
  CHECK(default_windows() == std::vector<int>{2, 4, 8, 16, 32, 64});
}
