#include "polrhet/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "polrhet/errors.hpp"

namespace polrhet::oracles {

namespace {

// [X | one dummy column per level of every fixed-effect dimension].
Eigen::MatrixXd with_dummies(const Eigen::MatrixXd& X,
                             std::span<const std::vector<int32_t>> fe) {
  Eigen::Index n = X.rows();
  Eigen::Index extra = 0;
  std::vector<int32_t> n_levels(fe.size(), 0);
  for (size_t d = 0; d < fe.size(); ++d) {
    for (int32_t code : fe[d]) n_levels[d] = std::max(n_levels[d], code + 1);
    extra += n_levels[d];
  }
  Eigen::MatrixXd A(n, X.cols() + extra);
  A.leftCols(X.cols()) = X;
  A.rightCols(extra).setZero();
  Eigen::Index offset = X.cols();
  for (size_t d = 0; d < fe.size(); ++d) {
    const auto& codes = fe[d];
    for (Eigen::Index i = 0; i < n; ++i) A(i, offset + codes[size_t(i)]) = 1.0;
    offset += n_levels[d];
  }
  return A;
}

Eigen::VectorXd svd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  return A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
}

Eigen::Index rank_of(const Eigen::MatrixXd& A) {
  if (A.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-9);
  return qr.rank();
}

// The dummy trap makes [X | dummies] rank-deficient by construction whenever
// there are two or more dimensions; X's coefficients are still unique as long
// as no combination of X columns lies in the dummy span.  Reject designs
// where they are not.
void require_identified(const Eigen::MatrixXd& X, const Eigen::MatrixXd& A, const char* who) {
  Eigen::Index dummy_rank = rank_of(A.rightCols(A.cols() - X.cols()));
  if (rank_of(A) != dummy_rank + X.cols())
    throw DomainError(std::string(who) + ": design too rank-deficient to identify coefficients");
}

}  // namespace

Eigen::VectorXd ols_dummies(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                            std::span<const std::vector<int32_t>> fe) {
  Eigen::MatrixXd A = with_dummies(X, fe);
  require_identified(X, A, "ols_dummies");
  return svd_solve(A, y).head(X.cols());
}

Eigen::VectorXd tsls_dummies(const Eigen::VectorXd& y, const Eigen::MatrixXd& Xexo,
                             const Eigen::MatrixXd& Xendo, const Eigen::MatrixXd& Z,
                             std::span<const std::vector<int32_t>> fe) {
  if (Z.cols() < Xendo.cols())
    throw DomainError("tsls_dummies: fewer instruments than endogenous columns");
  Eigen::Index n = y.size();
  Eigen::MatrixXd first(n, Z.cols() + Xexo.cols());
  first << Z, Xexo;
  Eigen::MatrixXd A1 = with_dummies(first, fe);
  Eigen::MatrixXd fitted(n, Xendo.cols());
  for (Eigen::Index j = 0; j < Xendo.cols(); ++j)
    fitted.col(j) = A1 * svd_solve(A1, Xendo.col(j));
  Eigen::MatrixXd second(n, Xendo.cols() + Xexo.cols());
  second << fitted, Xexo;
  Eigen::MatrixXd A2 = with_dummies(second, fe);
  require_identified(second, A2, "tsls_dummies");
  return svd_solve(A2, y).head(Xendo.cols() + Xexo.cols());
}

double iv_ratio(std::span<const double> y, std::span<const double> x, std::span<const double> z) {
  size_t n = y.size();
  if (n < 2 || x.size() != n || z.size() != n) throw DomainError("iv_ratio: bad input lengths");
  double my = 0, mx = 0, mz = 0;
  for (size_t i = 0; i < n; ++i) {
    my += y[i];
    mx += x[i];
    mz += z[i];
  }
  my /= double(n);
  mx /= double(n);
  mz /= double(n);
  double czy = 0, czx = 0;
  for (size_t i = 0; i < n; ++i) {
    czy += (z[i] - mz) * (y[i] - my);
    czx += (z[i] - mz) * (x[i] - mx);
  }
  if (czx == 0.0) throw DomainError("iv_ratio: instrument uncorrelated with regressor");
  return czy / czx;
}

double mcc_onehot(std::span<const int> pred, std::span<const int> gold) {
  size_t n = pred.size();
  if (n == 0 || gold.size() != n) throw DomainError("mcc_onehot: bad input lengths");
  std::vector<int> classes;
  for (int v : pred) classes.push_back(v);
  for (int v : gold) classes.push_back(v);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  double cov_pg = 0, cov_pp = 0, cov_gg = 0;
  for (int k : classes) {
    double mp = 0, mg = 0;
    for (size_t i = 0; i < n; ++i) {
      mp += pred[i] == k;
      mg += gold[i] == k;
    }
    mp /= double(n);
    mg /= double(n);
    double spg = 0, spp = 0, sgg = 0;
    for (size_t i = 0; i < n; ++i) {
      double p = double(pred[i] == k) - mp;
      double g = double(gold[i] == k) - mg;
      spg += p * g;
      spp += p * p;
      sgg += g * g;
    }
    cov_pg += spg;
    cov_pp += spp;
    cov_gg += sgg;
  }
  double denom = std::sqrt(cov_pp * cov_gg);
  return denom == 0.0 ? 0.0 : cov_pg / denom;
}

double kappa_pairwise(const std::vector<std::vector<int>>& item_category_counts) {
  size_t n_items = item_category_counts.size();
  if (n_items == 0) throw DomainError("kappa_pairwise: no items");
  size_t n_cat = item_category_counts[0].size();
  long long m = 0;
  for (int c : item_category_counts[0]) m += c;
  if (m < 2) throw DomainError("kappa_pairwise: fewer than two raters");

  // Observed agreement: fraction of ordered rater pairs that agree, per item.
  double p_obs = 0.0;
  std::vector<double> category_share(n_cat, 0.0);
  for (const auto& row : item_category_counts) {
    if (row.size() != n_cat) throw DomainError("kappa_pairwise: ragged counts");
    long long row_m = 0;
    long long agreeing_pairs = 0;
    for (size_t j = 0; j < n_cat; ++j) {
      row_m += row[j];
      agreeing_pairs += (long long)(row[j]) * (row[j] - 1);
      category_share[j] += row[j];
    }
    if (row_m != m) throw DomainError("kappa_pairwise: unequal rater counts across items");
    p_obs += double(agreeing_pairs) / double(m * (m - 1));
  }
  p_obs /= double(n_items);
  double p_chance = 0.0;
  for (size_t j = 0; j < n_cat; ++j) {
    double share = category_share[j] / double(n_items * size_t(m));
    p_chance += share * share;
  }
  if (p_chance == 1.0) return 1.0;  // all ratings in one category
  return (p_obs - p_chance) / (1.0 - p_chance);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  size_t n = a.size();
  if (n < 2 || b.size() != n) throw DomainError("pearson: bad input lengths");
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  double denom = std::sqrt(saa * sbb);
  if (denom == 0.0) throw DomainError("pearson: zero variance input");
  return sab / denom;
}

}  // namespace polrhet::oracles
