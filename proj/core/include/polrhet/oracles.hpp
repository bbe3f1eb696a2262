#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace polrhet::oracles {

// Brute-force reference implementations used to cross-check the production
// estimators and statistics.  They deliberately take different algorithmic
// routes (explicit dummy designs, covariance identities) and share no code
// with the production paths, so agreement between the two is meaningful.

// Least-squares coefficients of y on [X | dummies(fe_1) | dummies(fe_2) | ...]
// computed with a rank-revealing SVD (minimum-norm solution).  Returns only
// the coefficients on X's columns.  No demeaning, no iteration.  Throws
// DomainError when the design is so rank-deficient that X's coefficients are
// not identified (collinearity beyond the always-present dummy trap).
Eigen::VectorXd ols_dummies(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                            std::span<const std::vector<int32_t>> fe);

// Two-stage least squares with explicit dummy columns appended to both
// stages: first stage regresses each endogenous column on [Z | Xexo |
// dummies], second stage regresses y on [fitted endo | Xexo | dummies].
// Returns coefficients on [endo | Xexo].
Eigen::VectorXd tsls_dummies(const Eigen::VectorXd& y, const Eigen::MatrixXd& Xexo,
                             const Eigen::MatrixXd& Xendo, const Eigen::MatrixXd& Z,
                             std::span<const std::vector<int32_t>> fe);

// Just-identified instrumental-variable ratio cov(z, y) / cov(z, x).
double iv_ratio(std::span<const double> y, std::span<const double> x, std::span<const double> z);

// Multiclass Matthews correlation computed from one-hot covariance form:
// cov(onehot(pred), onehot(gold)) / sqrt(cov(pred,pred) * cov(gold,gold)),
// where cov(A, B) = sum_k cov(A_k, B_k).
double mcc_onehot(std::span<const int> pred, std::span<const int> gold);

// Chance-corrected multi-rater agreement computed from per-item pairwise
// agreement counts rather than the usual closed form.
double kappa_pairwise(const std::vector<std::vector<int>>& item_category_counts);

// Sample Pearson correlation.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace polrhet::oracles
