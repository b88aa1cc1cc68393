#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "umps/eig.hpp"
#include "umps/linalg.hpp"
#include "umps/tensor.hpp"

using namespace umps;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) { return to_matrix(Tensor::random({r, c}, rng), 1); }

LinearMap dense_map(const Matrix& m) {
  LinearMap map;
  map.dim = static_cast<std::size_t>(m.rows());
  map.apply = [m](std::span<const cplx> in, std::span<cplx> out) {
    Eigen::Map<const Eigen::VectorXcd> x(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Eigen::VectorXcd> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y = m * x;
  };
  return map;
}

}  // namespace

TEST(Tensor, ShapeAndStorage) {
  Tensor t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  t({1, 2, 3}) = 5.0;
  EXPECT_EQ(t[23], cplx(5.0));
  EXPECT_THROW(Tensor({2, 0}), ShapeError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<cplx>(3)), ShapeError);
}

TEST(Tensor, PermuteMatchesIndexing) {
  Rng rng(1);
  const Tensor t = Tensor::random({2, 3, 4}, rng);
  const Tensor p = t.permuted({2, 0, 1});
  ASSERT_EQ(p.shape(), (Shape{4, 2, 3}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(p({k, i, j}), t({i, j, k}));
}

TEST(Contract, IdentityOnVector) {
  Rng rng(2);
  const Tensor v = Tensor::random({3}, rng);
  const Tensor r = contract(Tensor::identity(3), v, {{1, 0}});
  EXPECT_LT(max_abs_diff(r, v), 1e-15);
}

TEST(Contract, TwoByTwoProduct) {
  const Tensor a({2, 2}, {1.0, 2.0, 3.0, 4.0});
  const Tensor b({2, 2}, {cplx(0, 1), 1.0, -1.0, 2.0});
  const Tensor r = contract(a, b, {{1, 0}});
  EXPECT_EQ(r({0, 0}), cplx(-2.0, 1.0));
  EXPECT_EQ(r({0, 1}), cplx(5.0));
  EXPECT_EQ(r({1, 0}), cplx(-4.0, 3.0));
  EXPECT_EQ(r({1, 1}), cplx(11.0));
}

TEST(Contract, MatchesLoopOracle) {
  Rng rng(3);
  const Tensor a = Tensor::random({2, 3, 4}, rng);
  const Tensor b = Tensor::random({4, 3}, rng);
  const Tensor r = contract(a, b, {{2, 0}, {1, 1}});
  const Tensor o = oracle::naive_contract(a, b, {{2, 0}, {1, 1}});
  ASSERT_EQ(r.shape(), o.shape());
  EXPECT_LT(max_abs_diff(r, o), 1e-13);
}

TEST(Contract, FreeIndexOrderAndOuterProduct) {
  Rng rng(4);
  const Tensor a = Tensor::random({3, 2, 5}, rng);
  const Tensor b = Tensor::random({5, 4, 2}, rng);
  const Tensor r = contract(a, b, {{1, 2}});
  EXPECT_EQ(r.shape(), (Shape{3, 5, 5, 4}));
  EXPECT_LT(max_abs_diff(r, oracle::naive_contract(a, b, {{1, 2}})), 1e-13);
  const Tensor outer = contract(Tensor::random({2}, rng), Tensor::random({3}, rng), {});
  EXPECT_EQ(outer.shape(), (Shape{2, 3}));
}

TEST(Contract, Errors) {
  Rng rng(5);
  const Tensor a = Tensor::random({2, 3}, rng);
  const Tensor b = Tensor::random({4, 3}, rng);
  try {
    contract(a, b, {{1, 0}});
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("(1,0)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(contract(a, b, {{2, 0}}), ShapeError);
  EXPECT_THROW(contract(a, b, {{1, 1}, {1, 1}}), ShapeError);
}

TEST(Contract, Associativity) {
  Rng rng(6);
  const Tensor a = Tensor::random({3, 4, 5}, rng);
  const Tensor b = Tensor::random({5, 2, 6}, rng);
  const Tensor c = Tensor::random({6, 4}, rng);
  const Tensor left = contract(contract(a, b, {{2, 0}}), c, {{3, 0}, {1, 1}});
  const Tensor right = contract(a, contract(b, c, {{2, 0}}), {{2, 0}, {1, 2}});
  EXPECT_LT(max_abs_diff(left, right), 1e-12 * left.norm());
}

TEST(QR, Identity) {
  const QRResult r = qr_positive(Matrix::Identity(3, 3));
  EXPECT_LT((r.Q - Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((r.R - Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(QR, SignConvention) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = -2.0;
  m(1, 1) = 3.0;
  const QRResult r = qr_positive(m);
  Matrix q = Matrix::Zero(2, 2), rr = Matrix::Zero(2, 2);
  q(0, 0) = -1.0;
  q(1, 1) = 1.0;
  rr(0, 0) = 2.0;
  rr(1, 1) = 3.0;
  EXPECT_LT((r.Q - q).norm(), 1e-15);
  EXPECT_LT((r.R - rr).norm(), 1e-15);
}

TEST(QR, RandomResiduals) {
  Rng rng(7);
  const Matrix m = random_matrix(8, 4, rng);
  const QRResult r = qr_positive(m);
  EXPECT_LT((r.Q * r.R - m).norm(), 1e-12 * m.norm());
  EXPECT_LT((r.Q.adjoint() * r.Q - Matrix::Identity(4, 4)).norm(), 1e-12);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_GT(r.R(i, i).real(), 0.0);
    EXPECT_EQ(r.R(i, i).imag(), 0.0);
    for (Eigen::Index j = 0; j < i; ++j) EXPECT_EQ(r.R(i, j), cplx(0.0));
  }
  EXPECT_FALSE(r.rank_deficient);
}

TEST(QR, RankDeficiencyAndShape) {
  Matrix m = Matrix::Zero(4, 2);
  m(0, 0) = 1.0;
  m(1, 0) = 1.0;
  EXPECT_TRUE(qr_positive(m).rank_deficient);
  EXPECT_THROW(qr_positive(Matrix::Zero(2, 3)), ShapeError);
}

TEST(LQ, RandomResiduals) {
  Rng rng(8);
  const Matrix m = random_matrix(3, 7, rng);
  const LQResult r = lq_positive(m);
  EXPECT_LT((r.L * r.Q - m).norm(), 1e-12 * m.norm());
  EXPECT_LT((r.Q * r.Q.adjoint() - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(SVD, Diagonal) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  const SVDResult r = svd(m);
  EXPECT_NEAR(r.S(0), 3.0, 1e-15);
  EXPECT_NEAR(r.S(1), 1.0, 1e-15);
}

TEST(SVD, RankOne) {
  Rng rng(9);
  const Matrix u = random_matrix(4, 1, rng), v = random_matrix(4, 1, rng);
  const SVDResult r = svd(u * v.adjoint());
  EXPECT_NEAR(r.S(0), u.norm() * v.norm(), 1e-12);
  EXPECT_NEAR(r.S(1), 0.0, 1e-12);
}

TEST(SVD, MatchesGramEigenvalues) {
  Rng rng(10);
  const Matrix m = random_matrix(6, 6, rng);
  const SVDResult r = svd(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(m.adjoint() * m));
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.S(i), std::sqrt(es.eigenvalues()(5 - i)), 1e-12);
  const Matrix rec = r.U * r.S.cast<cplx>().asDiagonal() * r.V.adjoint();
  EXPECT_LT((rec - m).norm(), 1e-12 * m.norm());
  EXPECT_LT((r.U.adjoint() * r.U - Matrix::Identity(6, 6)).norm(), 1e-12);
  EXPECT_LT((r.V.adjoint() * r.V - Matrix::Identity(6, 6)).norm(), 1e-12);
}

TEST(SVD, RejectsNonFinite) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(m), NumericalError);
}

TEST(Polar, UnitaryInput) {
  Rng rng(11);
  const Matrix u = qr_positive(random_matrix(3, 3, rng)).Q;
  const PolarLeft p = polar_left(u);
  EXPECT_LT((p.W - u).norm(), 1e-12);
  EXPECT_LT((p.P - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(Polar, ScaledIdentity) {
  const PolarLeft p = polar_left(2.0 * Matrix::Identity(3, 3));
  EXPECT_LT((p.W - Matrix::Identity(3, 3)).norm(), 1e-14);
  EXPECT_LT((p.P - 2.0 * Matrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(Polar, RandomResiduals) {
  Rng rng(12);
  const Matrix m = random_matrix(8, 4, rng);
  const PolarLeft l = polar_left(m);
  EXPECT_LT((l.W * l.P - m).norm(), 1e-12 * m.norm());
  EXPECT_LT((l.W.adjoint() * l.W - Matrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT((l.P - l.P.adjoint()).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(l.P));
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-13);

  const Matrix mt = m.transpose();
  const PolarRight r = polar_right(mt);
  EXPECT_LT((r.P * r.W - mt).norm(), 1e-12 * m.norm());
  EXPECT_LT((r.W * r.W.adjoint() - Matrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_THROW(polar_left(mt), ShapeError);
  EXPECT_THROW(polar_right(m), ShapeError);
}

TEST(LeadingEig, Diagonal) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const std::vector<cplx> guess{0.6, 0.8};
  const EigResult r = leading_eig(dense_map(m), guess);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(std::abs(r.value - 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.vector[0]), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.vector[1]), 0.0, 1e-12);
}

TEST(LeadingEig, IdentityKeepsGuess) {
  const std::vector<cplx> guess{1.0, cplx(0, 2.0), 2.0};
  const EigResult r = leading_eig(dense_map(Matrix::Identity(3, 3)), guess);
  EXPECT_NEAR(std::abs(r.value - 1.0), 0.0, 1e-14);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(r.vector[i] - guess[i] / 3.0), 0.0, 1e-14);
  EXPECT_TRUE(r.converged);
}

TEST(LeadingEig, MatchesDenseOracle) {
  Rng rng(13);
  const Matrix m = random_matrix(16, 16, rng);
  const EigResult r = leading_eig(dense_map(m), {});
  const auto o = oracle::dense_leading(Eigen::MatrixXcd(m));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(std::abs(r.value), std::abs(o.value), 1e-10);
  EXPECT_LE(r.residual, 1e-12 * std::max(1.0, std::abs(r.value)));
  double nrm = 0.0;
  for (auto x : r.vector) nrm += std::norm(x);
  EXPECT_NEAR(std::sqrt(nrm), 1.0, 1e-12);
}

TEST(LeadingEig, HermitianGivesRealValue) {
  Rng rng(14);
  const Matrix a = random_matrix(20, 20, rng);
  const Matrix h = a + a.adjoint();
  const EigResult r = leading_eig(dense_map(h), {});
  EXPECT_LT(std::abs(r.value.imag()), 1e-12);
}

TEST(LeadingEig, GuessIndependence) {
  Rng rng(15);
  const Matrix m = random_matrix(30, 30, rng);
  const auto eigs = oracle::dense_spectrum(Eigen::MatrixXcd(m));
  ASSERT_GT(std::abs(eigs[0]) - std::abs(eigs[1]), 1e-10);
  const EigResult a = leading_eig(dense_map(m), {});
  const auto g = Tensor::random({30}, rng);
  const EigResult b = leading_eig(dense_map(m), g.storage());
  EXPECT_LT(std::abs(a.value - b.value), 1e-11 * std::abs(a.value));
}

TEST(LeadingEig, Determinism) {
  Rng rng(16);
  const Matrix m = random_matrix(25, 25, rng);
  const auto g = Tensor::random({25}, rng);
  const EigResult a = leading_eig(dense_map(m), g.storage());
  const EigResult b = leading_eig(dense_map(m), g.storage());
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.vector, b.vector);
}

TEST(LeadingEig, FlagsDegeneracyAndNonConvergence) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  m(2, 2) = 0.5;
  EXPECT_TRUE(leading_eig(dense_map(m), {}).degenerate);

  Rng rng(17);
  const Matrix big = random_matrix(200, 200, rng);
  EigOptions eo;
  eo.krylov_dim = 3;
  eo.max_restarts = 1;
  const EigResult r = leading_eig(dense_map(big), {}, eo);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.residual, 0.0);
}

TEST(LinearMap, Linearity) {
  Rng rng(18);
  const Matrix m = random_matrix(10, 10, rng);
  const LinearMap map = dense_map(m);
  const auto x = Tensor::random({10}, rng), y = Tensor::random({10}, rng);
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  std::vector<cplx> z(10);
  for (int i = 0; i < 10; ++i) z[i] = a * x[i] + b * y[i];
  const auto fz = map(z), fx = map(x.storage()), fy = map(y.storage());
  double err = 0.0;
  for (int i = 0; i < 10; ++i) err += std::norm(fz[i] - a * fx[i] - b * fy[i]);
  EXPECT_LE(std::sqrt(err), 1e-12 * (x.norm() + y.norm()));
}
