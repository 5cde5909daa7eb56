#include <doctest.h>

#include "../support/oracles.hpp"
#include "patchr0/errors.hpp"
#include "patchr0/zero_structure.hpp"

using namespace patchr0;

namespace {

Matrix two_pairs() {
  Matrix l = Matrix::Zero(4, 4);
  l.topLeftCorner(2, 2) = Matrix{{-1.0, 1.0}, {1.0, -1.0}};
  l.bottomRightCorner(2, 2) = Matrix{{-1.0, 1.0}, {1.0, -1.0}};
  return l;
}

const Matrix kChain{{-1.0, 0.0, 0.0}, {1.0, -2.0, 0.0}, {0.0, 2.0, 0.0}};
const Matrix kPair{{-1.0, 2.0}, {1.0, -2.0}};

}  // namespace

TEST_CASE("connectivity matrix rejects H1 violations") {
  CHECK_NOTHROW(ConnectivityMatrix{kPair});
  Matrix off = kPair;
  off(1, 0) += 1e-3;
  CHECK_THROWS_AS(ConnectivityMatrix{off}, HypothesisError);
  try {
    ConnectivityMatrix bad(off);
  } catch (const HypothesisError& e) {
    CHECK(e.hypothesis() == "H1");
  }
  const Matrix anti{{1.0, -1.0}, {-1.0, 1.0}};
  CHECK_THROWS_AS(ConnectivityMatrix{anti}, HypothesisError);
  CHECK(ConnectivityMatrix::zero(3).structure().block_count() == 3);
}

TEST_CASE("block classification examples") {
  const auto one = classify_blocks(ConnectivityMatrix(kPair));
  CHECK(one.lambda0.size() == 1);
  CHECK(one.lambda0c.empty());

  const ConnectivityMatrix chain(kChain);
  const auto c = classify_blocks(chain);
  REQUIRE(c.lambda0.size() == 1);
  CHECK(chain.structure().blocks[c.lambda0[0]] == std::vector<std::size_t>{2});
  CHECK(c.lambda0c.size() == 2);

  const auto two = classify_blocks(ConnectivityMatrix(two_pairs()));
  CHECK(two.lambda0.size() == 2);
  CHECK(two.lambda0c.empty());
}

TEST_CASE("basis of the irreducible 2x2") {
  const auto b = build_basis(ConnectivityMatrix(kPair));
  CHECK(b.alpha0 == 1);
  CHECK(b.P(0, 0) == doctest::Approx(1.0));
  CHECK(b.P(0, 1) == doctest::Approx(1.0));
  CHECK(b.Q(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(b.Q(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("basis of the leaky chain solves the left equation on leaky blocks") {
  const auto b = build_basis(ConnectivityMatrix(kChain));
  CHECK(b.alpha0 == 1);
  CHECK((b.Q - Matrix(Vector::Unit(3, 2))).cwiseAbs().maxCoeff() < 1e-14);
  for (int i = 0; i < 3; ++i) CHECK(b.P(0, i) == doctest::Approx(1.0));
  // Leaky blocks first, the conservative block last.
  CHECK(b.permutation.back() == 2);
}

TEST_CASE("basis of two decoupled pairs") {
  const auto b = build_basis(ConnectivityMatrix(two_pairs()));
  REQUIRE(b.alpha0 == 2);
  const Matrix q{{0.5, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.0, 0.5}};
  const Matrix p{{1.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 1.0}};
  CHECK((b.Q - q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.P - p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("random bases satisfy the invariants") {
  oracle::Rng rng(2024);
  for (int k = 0; k < 100; ++k) {
    const int n = rng.integer(1, 8);
    const Matrix l = rng.h1(n, rng.chance(0.3));
    const auto b = build_basis(ConnectivityMatrix(l));
    CHECK(basis_residuals(b).max() < 1e-10);
    CHECK(b.alpha0 == oracle::nullity(l));
    CHECK(b.P.minCoeff() >= 0.0);
    CHECK(b.Q.minCoeff() >= 0.0);
    for (std::size_t c = 0; c < b.alpha0; ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      CHECK(b.Q.col(col).sum() == doctest::Approx(1.0));
      for (std::size_t i = 0; i < b.size(); ++i) {
        const bool inside = std::find(b.zero_blocks[c].begin(), b.zero_blocks[c].end(), i) !=
                            b.zero_blocks[c].end();
        const double q = b.Q(static_cast<Eigen::Index>(i), col);
        CHECK((inside ? q > 0.0 : q == 0.0));
      }
    }
  }
}

TEST_CASE("aggregation examples") {
  const auto b = build_basis(ConnectivityMatrix(kPair));
  const Matrix m = Vector(Vector::LinSpaced(2, 3.0, 5.0)).asDiagonal();
  CHECK(aggregate(b, m)(0, 0) == doctest::Approx((2.0 * 3.0 + 5.0) / 3.0));
  CHECK(aggregate(b, Matrix::Zero(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  const auto b4 = build_basis(ConnectivityMatrix(two_pairs()));
  CHECK((aggregate(b4, Matrix::Identity(4, 4)) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(aggregate(b, Matrix::Identity(3, 3)), PreconditionError);
}

TEST_CASE("aggregation keeps cooperativity and is basis independent up to similarity") {
  oracle::Rng rng(99);
  for (int k = 0; k < 60; ++k) {
    const int n = rng.integer(2, 8);
    const auto b = build_basis(ConnectivityMatrix(rng.h1(n, false)));
    const Matrix m = rng.cooperative(n);
    const Matrix agg = aggregate(b, m);
    CHECK(is_cooperative(agg));

    Vector c(static_cast<Eigen::Index>(b.alpha0));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.uniform(0.1, 10.0);
    const Matrix q_hat = b.Q * c.asDiagonal();
    const Matrix p_hat = c.cwiseInverse().asDiagonal() * b.P;
    CHECK(oracle::spectrum_distance(agg, p_hat * m * q_hat) < 1e-8);
  }
}

TEST_CASE("subproblem extraction matches the aggregated principal block") {
  SUBCASE("two decoupled pairs, first block") {
    const auto b = build_basis(ConnectivityMatrix(two_pairs()));
    Matrix m = Matrix::Constant(4, 4, 0.5);
    m.diagonal().setConstant(-1.0);
    const auto sub = extract_subproblem(b, m, {0});
    CHECK(sub.indices == std::vector<std::size_t>{0, 1});
    CHECK((sub.L - Matrix{{-1.0, 1.0}, {1.0, -1.0}}).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sub.M - m.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("leaky chain keeps everything") {
    const auto b = build_basis(ConnectivityMatrix(kChain));
    const auto sub = extract_subproblem(b, Matrix::Identity(3, 3), {0});
    CHECK(sub.indices == std::vector<std::size_t>{0, 1, 2});
  }
  SUBCASE("random") {
    oracle::Rng rng(7);
    for (int k = 0; k < 40; ++k) {
      const int n = rng.integer(2, 8);
      const auto b = build_basis(ConnectivityMatrix(rng.h1(n, false)));
      const Matrix m = rng.cooperative(n);
      const Matrix agg = aggregate(b, m);
      std::vector<std::size_t> sel;
      for (std::size_t l = 0; l < b.alpha0; ++l) {
        if (rng.chance(0.5)) sel.push_back(l);
      }
      if (sel.empty()) sel.push_back(0);
      const auto sub = extract_subproblem(b, m, sel);
      const Matrix expected = submatrix(agg, sel, sel);
      CHECK((aggregate_linear(sub.basis, sub.M) - expected).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((sub.basis.P * sub.basis.Q - Matrix::Identity(sub.basis.P.rows(), sub.basis.P.rows()))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    }
  }
  SUBCASE("bad selector") {
    const auto b = build_basis(ConnectivityMatrix(kPair));
    CHECK_THROWS_AS(extract_subproblem(b, Matrix::Identity(2, 2), {1}), PreconditionError);
    CHECK_THROWS_AS(extract_subproblem(b, Matrix::Identity(2, 2), {}), PreconditionError);
  }
}
