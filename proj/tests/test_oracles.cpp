#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "polrhet/errors.hpp"
#include "polrhet/oracles.hpp"
#include "polrhet/rng.hpp"

using namespace polrhet;

TEST_SUITE("oracles") {

TEST_CASE("ols_dummies recovers an exact line") {
  Eigen::VectorXd y(4), x(4);
  x << 0, 1, 2, 3;
  y = 2.0 * x.array() + 1.0;
  Eigen::MatrixXd X(4, 2);
  X.col(0) = x;
  X.col(1).setOnes();
  Eigen::VectorXd beta = oracles::ols_dummies(y, X, {});
  CHECK(near(beta[0], 2.0, 1e-12));
  CHECK(near(beta[1], 1.0, 1e-12));
}

TEST_CASE("ols_dummies with one dimension equals group-demeaned fit") {
  // Two groups with different means; slope recoverable after demeaning.
  std::vector<std::vector<int32_t>> fe = {{0, 0, 0, 1, 1, 1}};
  Eigen::VectorXd x(6), y(6);
  x << 1, 2, 3, 1, 2, 3;
  for (int i = 0; i < 6; ++i) y[i] = 1.5 * x[i] + (i < 3 ? 10.0 : -4.0);
  Eigen::MatrixXd X = x;

  Eigen::VectorXd beta = oracles::ols_dummies(y, X, fe);
  REQUIRE(beta.size() == 1);
  CHECK(near(beta[0], 1.5, 1e-10));

  // Manual within transform gives the same slope.
  double gx[2] = {(1 + 2 + 3) / 3.0, (1 + 2 + 3) / 3.0};
  double gy[2] = {(y[0] + y[1] + y[2]) / 3.0, (y[3] + y[4] + y[5]) / 3.0};
  double num = 0, den = 0;
  for (int i = 0; i < 6; ++i) {
    int g = i < 3 ? 0 : 1;
    num += (x[i] - gx[g]) * (y[i] - gy[g]);
    den += (x[i] - gx[g]) * (x[i] - gx[g]);
  }
  CHECK(near(beta[0], num / den, 1e-12));
}

TEST_CASE("ols_dummies rejects unidentified regressors") {
  // x is constant within both groups: within variance zero, not identified.
  std::vector<std::vector<int32_t>> fe = {{0, 0, 1, 1}};
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  Eigen::MatrixXd X(4, 1);
  X << 5, 5, 7, 7;
  CHECK_THROWS_AS(oracles::ols_dummies(y, X, fe), DomainError);
}

TEST_CASE("tsls_dummies matches the analytic ratio when just identified") {
  Rng rng(31);
  int n = 200;
  Eigen::VectorXd z(n), x(n), y(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.normal();
    z[i] = rng.normal();
    x[i] = 0.8 * z[i] + 0.5 * u + 0.3 * rng.normal();
    y[i] = 1.7 * x[i] + u;
  }
  Eigen::MatrixXd Xexo(n, 1);
  Xexo.setOnes();
  Eigen::VectorXd beta = oracles::tsls_dummies(y, Xexo, x, z, {});
  REQUIRE(beta.size() == 2);

  // Demean by hand and compare to cov(z,y)/cov(z,x): the intercept-only
  // exogenous block makes the slope exactly the centered IV ratio.
  std::vector<double> yv(y.data(), y.data() + n), xv(x.data(), x.data() + n),
      zv(z.data(), z.data() + n);
  CHECK(near(beta[0], oracles::iv_ratio(yv, xv, zv), 1e-10));

  CHECK_THROWS_AS(oracles::tsls_dummies(y, Xexo, x, Eigen::MatrixXd(n, 0), {}), DomainError);
}

TEST_CASE("iv_ratio hand case and input guards") {
  // z = (0,1,2), x = (1,3,4), y = (2,7,9):
  // cov(z,y) = 7/2... compute directly: means z=1, x=8/3, y=6.
  // sum (z-mz)(y-my) = (-1)(-4)+0+1*3 = 7; sum (z-mz)(x-mx) = (-1)(-5/3)+0+(4/3) = 3.
  std::vector<double> z = {0, 1, 2}, x = {1, 3, 4}, y = {2, 7, 9};
  CHECK(near(oracles::iv_ratio(y, x, z), 7.0 / 3.0, 1e-14));

  std::vector<double> flat = {1, 1, 1};
  CHECK_THROWS_AS(oracles::iv_ratio(y, flat, z), DomainError);   // cov(z,x)=0
  std::vector<double> shorter = {1, 2};
  CHECK_THROWS_AS(oracles::iv_ratio(y, x, shorter), DomainError);
}

TEST_CASE("mcc_onehot agrees with the binary closed form") {
  // Binary confusion: tp=3, tn=2, fp=1, fn=1.
  // pred: 1,1,1,1,0,0,0  gold: 1,1,1,0,0,0,1
  std::vector<int> pred = {1, 1, 1, 1, 0, 0, 0};
  std::vector<int> gold = {1, 1, 1, 0, 0, 0, 1};
  double tp = 3, tn = 2, fp = 1, fn = 1;
  double expected = (tp * tn - fp * fn) /
                    std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  CHECK(near(oracles::mcc_onehot(pred, gold), expected, 1e-12));

  std::vector<int> perfect = {0, 1, 2, 1, 0};
  CHECK(near(oracles::mcc_onehot(perfect, perfect), 1.0, 1e-12));

  // Constant predictions carry no information: denominator zero -> 0 by convention.
  std::vector<int> constant(gold.size(), 1);
  CHECK(oracles::mcc_onehot(constant, gold) == 0.0);
}

TEST_CASE("kappa_pairwise hand case") {
  // Two items, two raters, two categories.
  // Item 1: both pick A. Item 2: split. P_obs = (1 + 0)/2 = 0.5.
  // Shares: A: 3/4, B: 1/4 -> P_e = 9/16 + 1/16 = 10/16 = 0.625.
  // kappa = (0.5 - 0.625)/(1 - 0.625) = -1/3.
  std::vector<std::vector<int>> counts = {{2, 0}, {1, 1}};
  CHECK(near(oracles::kappa_pairwise(counts), -1.0 / 3.0, 1e-14));

  std::vector<std::vector<int>> unanimous = {{3, 0, 0}, {0, 3, 0}, {0, 0, 3}};
  CHECK(near(oracles::kappa_pairwise(unanimous), 1.0, 1e-14));

  std::vector<std::vector<int>> one_category = {{3, 0}, {3, 0}};
  CHECK(oracles::kappa_pairwise(one_category) == 1.0);

  std::vector<std::vector<int>> ragged = {{2, 0}, {1, 1, 0}};
  CHECK_THROWS_AS(oracles::kappa_pairwise(ragged), DomainError);
  std::vector<std::vector<int>> unequal = {{2, 0}, {2, 1}};
  CHECK_THROWS_AS(oracles::kappa_pairwise(unequal), DomainError);
}

TEST_CASE("pearson hand cases") {
  std::vector<double> a = {1, 2, 3, 4};
  std::vector<double> b = {2, 4, 6, 8};
  CHECK(near(oracles::pearson(a, b), 1.0, 1e-14));
  std::vector<double> c = {8, 6, 4, 2};
  CHECK(near(oracles::pearson(a, c), -1.0, 1e-14));
  // Symmetric V shape is uncorrelated with its index.
  std::vector<double> idx = {-1, 0, 1};
  std::vector<double> vee = {1, 0, 1};
  CHECK(near(oracles::pearson(idx, vee), 0.0, 1e-14));
  std::vector<double> flat = {3, 3, 3};
  CHECK_THROWS_AS(oracles::pearson(idx, flat), DomainError);
}

}  // TEST_SUITE
