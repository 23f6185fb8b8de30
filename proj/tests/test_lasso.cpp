#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "sparsenet/lasso.hpp"

using namespace sparsenet;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST(Lasso, SoftThreshold) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
  EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-1.0, 1.0), 0.0);
}

TEST(Lasso, ZeroAboveLambdaMax) {
  const Eigen::MatrixXd f = random_matrix(30, 8, 1);
  const Eigen::VectorXd y = random_matrix(30, 1, 2).col(0);
  const double lmax = lasso_lambda_max(f, y);
  EXPECT_EQ(lasso(f, y, lmax).active(), 0u);
  EXPECT_EQ(lasso(f, y, 2.0 * lmax).active(), 0u);
  EXPECT_GT(lasso(f, y, 0.9 * lmax).active(), 0u);
}

TEST(Lasso, OrthonormalColumnsGiveSoftThresholdedProjection) {
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(20, 5, 3)).householderQ() *
                            Eigen::MatrixXd::Identity(20, 5);
  const Eigen::VectorXd y = random_matrix(20, 1, 4).col(0);
  const Eigen::VectorXd proj = q.transpose() * y;
  for (double lambda : {0.0, 0.1, 0.5}) {
    const LassoResult r = lasso(q, y, lambda);
    ASSERT_TRUE(r.converged);
    for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(r.coefficients(i), soft_threshold(proj(i), lambda), 1e-9);
  }
}

TEST(Lasso, KktConditionsHold) {
  const Eigen::MatrixXd f = random_matrix(50, 20, 5);
  const Eigen::VectorXd y = random_matrix(50, 1, 6).col(0);
  const double lmax = lasso_lambda_max(f, y);
  for (double frac : {0.5, 0.1, 0.01}) {
    LassoOptions opt;
    opt.tolerance = 1e-12;
    const LassoResult r = lasso(f, y, frac * lmax, {}, opt);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(lasso_kkt_violation(f, y, r.coefficients, frac * lmax), 1e-6);
  }
}

TEST(Lasso, ZeroColumnStaysZero) {
  Eigen::MatrixXd f = random_matrix(10, 3, 7);
  f.col(1).setZero();
  const Eigen::VectorXd y = random_matrix(10, 1, 8).col(0);
  EXPECT_EQ(lasso(f, y, 0.0).coefficients(1), 0.0);
}

TEST(Lasso, PathSelectRespectsActiveLimit) {
  const Eigen::MatrixXd f = random_matrix(60, 30, 9);
  const Eigen::VectorXd y = random_matrix(60, 1, 10).col(0);
  for (std::size_t k : {1u, 5u, 12u}) {
    const LassoPathPoint p = lasso_path_select(f, y, k);
    EXPECT_LE(p.result.active(), k);
    EXPECT_LE(p.lambda, lasso_lambda_max(f, y));
  }
  EXPECT_THROW(lasso(f, y, -1.0), ValidationError);
}

TEST(Lasso, Deterministic) {
  const Eigen::MatrixXd f = random_matrix(40, 15, 11);
  const Eigen::VectorXd y = random_matrix(40, 1, 12).col(0);
  EXPECT_EQ(lasso(f, y, 0.3).coefficients, lasso(f, y, 0.3).coefficients);
}

TEST(Lasso, ActiveSetRefinementOnCorrelatedColumns) {
  // nearly collinear columns: plain descent needs very many sweeps here
  Eigen::MatrixXd f = random_matrix(80, 40, 13);
  const Eigen::MatrixXd base = random_matrix(80, 1, 14);
  for (Eigen::Index j = 0; j < f.cols(); ++j) f.col(j) = base.col(0) + 0.02 * f.col(j);
  const Eigen::VectorXd y = random_matrix(80, 1, 15).col(0);
  const double lambda = 1e-3 * lasso_lambda_max(f, y);
  LassoOptions opt;
  opt.max_sweeps = 200;
  const LassoResult r = lasso(f, y, lambda, {}, opt);
  EXPECT_TRUE(r.polished);
  EXPECT_LE(lasso_kkt_violation(f, y, r.coefficients, lambda), 1e-9);
  opt.polish_every = 0;
  const LassoResult plain = lasso(f, y, lambda, {}, opt);
  EXPECT_FALSE(plain.polished);
  EXPECT_GT(lasso_kkt_violation(f, y, plain.coefficients, lambda), 1e-9);
}
