#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/generators.hpp"
#include "twistfix/errors.hpp"
#include "twistfix/matrix_algebra.hpp"

#include <algorithm>
#include <cmath>

using namespace twistfix;

namespace {

/// Matrix units of M_{d_1} + ... + M_{d_r} placed block-diagonally.
std::vector<Matrix> block_units(const std::vector<int>& sizes) {
  int d = 0;
  for (int s : sizes) d += s;
  std::vector<Matrix> out;
  int offset = 0;
  for (int s : sizes) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        Matrix e = Matrix::Zero(d, d);
        e(offset + i, offset + j) = 1.0;
        out.push_back(e);
      }
    }
    offset += s;
  }
  return out;
}

/// Conjugates every matrix by a fixed random unitary, hiding the block structure.
std::vector<Matrix> scramble(const std::vector<Matrix>& mats, testgen::Gen& gen) {
  const auto d = mats.front().rows();
  Eigen::HouseholderQR<Matrix> qr(gen.matrix(d, d));
  const Matrix u = qr.householderQ();
  std::vector<Matrix> out;
  for (const auto& m : mats) out.push_back(u * m * u.adjoint());
  return out;
}

}  // namespace

TEST_CASE("numerical rank of products of random factors") {
  testgen::Gen gen(61);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = gen.integer(1, 6);
    const Matrix a = gen.matrix(8, r) * gen.matrix(r, 7);
    CHECK(numerical_rank(a) == static_cast<std::size_t>(r));
    const Matrix k = nullspace(a);
    CHECK(k.cols() == 7 - r);
    if (k.cols() > 0) {
      CHECK((a * k).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((k.adjoint() * k - Matrix::Identity(k.cols(), k.cols())).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  CHECK(numerical_rank(Matrix::Zero(3, 3)) == 0);
}

TEST_CASE("ambiguous ranks raise IllConditioned") {
  Matrix a = Matrix::Identity(3, 3);
  a(2, 2) = 1e-9;
  CHECK_THROWS_AS(numerical_rank(a), IllConditioned);
  a(2, 2) = 1e-14;
  CHECK(numerical_rank(a) == 2);
  a(2, 2) = 1e-3;
  CHECK(numerical_rank(a) == 3);
}

TEST_CASE("flatten round trip and span builder") {
  testgen::Gen gen(67);
  const Matrix m = gen.matrix(3, 4);
  CHECK(unflatten(flatten(m), 3, 4) == m);
  SpanBuilder span(5);
  const Vector a = gen.matrix(5, 1);
  const Vector b = gen.matrix(5, 1);
  CHECK(span.add(a));
  CHECK(span.add(b));
  CHECK_FALSE(span.add(a * Complex(2.0, -1.0) + b * 3.0));
  CHECK(span.dimension() == 2);
  CHECK(span.contains(a - b));
  CHECK(span.residual(a + b).norm() < 1e-12);
  const Vector c = gen.matrix(5, 1);
  CHECK_FALSE(span.contains(c));
  const Vector res = span.residual(c);
  for (const auto& v : span.basis()) CHECK(std::abs(v.dot(res)) < 1e-12);
}

TEST_CASE("ideal closure") {
  const auto units = block_units({2, 1});
  // The ideal generated by a unit of the first block is that block.
  const auto ideal = ideal_closure({units[0]}, units);
  CHECK(ideal.size() == 4);
  const auto all = ideal_closure({Matrix::Identity(3, 3)}, units);
  CHECK(all.size() == 5);
  const auto capped = ideal_closure({Matrix::Identity(3, 3)}, units, kRankTol, 5);
  CHECK(capped.size() == 5);
  CHECK(ideal_closure({Matrix::Zero(3, 3)}, units).empty());
}

TEST_CASE("Wedderburn blocks of hidden block algebras (property)") {
  testgen::Gen gen(71);
  const std::vector<std::vector<int>> shapes = {{1}, {2}, {1, 1}, {3, 1}, {2, 2, 1}, {1, 1, 1, 1}, {3, 2}};
  for (const auto& shape : shapes) {
    const auto basis = scramble(block_units(shape), gen);
    const auto res = wedderburn_blocks(basis, basis, gen.raw());
    auto expected = shape;
    std::sort(expected.rbegin(), expected.rend());
    CHECK(res.blocks == expected);
    CHECK(res.center_dim == shape.size());
    CHECK(res.algebra_dim == basis.size());
  }
}

TEST_CASE("operator norm") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(0.0, -5.0);
  CHECK(std::abs(operator_norm(d) - 5.0) < 1e-12);
}
