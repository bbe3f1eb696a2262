#include "polrhet/econest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "polrhet/errors.hpp"

namespace polrhet::econest {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// Specification parsing.

namespace {

using nlohmann::json;

std::vector<std::string> string_array(const json& j, const std::string& key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ConfigError("spec field '" + key + "' must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ConfigError("spec field '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

RegressionSpec spec_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("spec must be a JSON object");
  static const std::vector<std::string> known = {"outcome",     "exogenous", "endogenous",
                                                 "instruments", "fixed_effects", "cluster",
                                                 "sample_filter"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown spec field '" + key + "'");
  if (!j.contains("outcome") || !j["outcome"].is_string())
    throw ConfigError("spec needs a string 'outcome'");

  RegressionSpec spec;
  spec.outcome = j["outcome"].get<std::string>();
  spec.exogenous = string_array(j, "exogenous");
  spec.endogenous = string_array(j, "endogenous");
  spec.instruments = string_array(j, "instruments");
  spec.fixed_effects = string_array(j, "fixed_effects");
  if (j.contains("cluster")) spec.cluster = j["cluster"].get<std::string>();
  if (j.contains("sample_filter")) spec.sample_filter = j["sample_filter"].get<std::string>();
  return spec;
}

RegressionSpec read_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open spec '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_json(ss.str());
}

std::string spec_to_json(const RegressionSpec& spec) {
  json j;
  j["outcome"] = spec.outcome;
  j["exogenous"] = spec.exogenous;
  j["endogenous"] = spec.endogenous;
  j["instruments"] = spec.instruments;
  j["fixed_effects"] = spec.fixed_effects;
  j["cluster"] = spec.cluster;
  j["sample_filter"] = spec.sample_filter;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Column expressions.

namespace {

std::vector<std::string> split_product(const std::string& expr) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (true) {
    size_t p = expr.find(" x ", pos);
    std::string part = p == std::string::npos ? expr.substr(pos) : expr.substr(pos, p - pos);
    while (!part.empty() && part.front() == ' ') part.erase(part.begin());
    while (!part.empty() && part.back() == ' ') part.pop_back();
    if (part.empty()) throw ConfigError("empty factor in expression '" + expr + "'");
    parts.push_back(std::move(part));
    if (p == std::string::npos) return parts;
    pos = p + 3;
  }
}

Eigen::VectorXd resolve_numeric(const DataTable& table, const std::string& expr) {
  auto parts = split_product(expr);
  Eigen::VectorXd out = Eigen::VectorXd::Ones(Eigen::Index(table.n_rows()));
  for (const auto& part : parts) {
    auto vals = table.numeric(part);
    for (size_t i = 0; i < vals.size(); ++i) out[Eigen::Index(i)] *= vals[i];
  }
  return out;
}

std::vector<int32_t> resolve_categorical(const DataTable& table, const std::string& expr) {
  auto parts = split_product(expr);
  if (parts.size() == 1) {
    auto c = table.codes(parts[0]);
    return {c.begin(), c.end()};
  }
  return table.combined_codes(parts);
}

}  // namespace

// ---------------------------------------------------------------------------
// Absorption.

namespace {

// Subtracts group means of every column for one fixed-effect dimension.
// Columns are independent, so the column range is split across threads;
// per-column arithmetic order never changes, keeping results identical for
// every thread count.
void demean_dimension(Eigen::MatrixXd& M, const std::vector<int32_t>& codes,
                      const std::vector<int64_t>& group_sizes, int threads) {
  const Eigen::Index n = M.rows(), k = M.cols();
  auto sweep_columns = [&](Eigen::Index j0, Eigen::Index j1) {
    std::vector<double> sum(group_sizes.size());
    for (Eigen::Index j = j0; j < j1; ++j) {
      std::fill(sum.begin(), sum.end(), 0.0);
      const double* col = M.col(j).data();
      for (Eigen::Index i = 0; i < n; ++i) sum[size_t(codes[size_t(i)])] += col[i];
      for (size_t g = 0; g < sum.size(); ++g) sum[g] /= double(group_sizes[g]);
      double* out = M.col(j).data();
      for (Eigen::Index i = 0; i < n; ++i) out[i] -= sum[size_t(codes[size_t(i)])];
    }
  };
  if (threads <= 1 || k == 1) {
    sweep_columns(0, k);
    return;
  }
  const int used = int(std::min<Eigen::Index>(threads, k));
  std::vector<std::thread> workers;
  workers.reserve(size_t(used));
  for (int t = 0; t < used; ++t) {
    Eigen::Index j0 = k * t / used, j1 = k * (t + 1) / used;
    workers.emplace_back(sweep_columns, j0, j1);
  }
  for (auto& w : workers) w.join();
}

}  // namespace

AbsorbResult absorb_fixed_effects(const Eigen::MatrixXd& data,
                                  std::vector<std::vector<int32_t>> fe,
                                  const AbsorbOptions& options) {
  const Eigen::Index n = data.rows();
  for (const auto& dim : fe) {
    if (Eigen::Index(dim.size()) != n)
      throw EstimationError("fixed-effect dimension length does not match data rows");
    for (int32_t c : dim)
      if (c < 0) throw EstimationError("negative fixed-effect code");
  }

  // Iteratively drop observations that are alone in any group: they are fit
  // exactly by their own effect and contribute nothing to the within
  // variation.  Removals can create fresh singletons in other dimensions.
  std::vector<char> keep(size_t(n), 1);
  int64_t dropped = 0;
  if (!fe.empty()) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& dim : fe) {
        int32_t max_code = 0;
        for (size_t i = 0; i < size_t(n); ++i)
          if (keep[i]) max_code = std::max(max_code, dim[i]);
        std::vector<int64_t> count(size_t(max_code) + 1, 0);
        for (size_t i = 0; i < size_t(n); ++i)
          if (keep[i]) count[size_t(dim[i])] += 1;
        for (size_t i = 0; i < size_t(n); ++i) {
          if (keep[i] && count[size_t(dim[i])] == 1) {
            keep[i] = 0;
            ++dropped;
            changed = true;
          }
        }
      }
    }
  }

  AbsorbResult result;
  result.singletons_dropped = dropped;
  for (size_t i = 0; i < size_t(n); ++i)
    if (keep[i]) result.kept_rows.push_back(int64_t(i));
  if (result.kept_rows.empty())
    throw EstimationError("every observation was dropped as a fixed-effect singleton");

  const Eigen::Index m = Eigen::Index(result.kept_rows.size());
  result.data.resize(m, data.cols());
  for (Eigen::Index i = 0; i < m; ++i) result.data.row(i) = data.row(result.kept_rows[size_t(i)]);

  // Re-code each dimension densely over the kept rows (first-appearance order).
  result.fe_codes.resize(fe.size());
  result.fe_levels.resize(fe.size());
  std::vector<std::vector<int64_t>> sizes(fe.size());
  for (size_t d = 0; d < fe.size(); ++d) {
    std::unordered_map<int32_t, int32_t> remap;
    auto& codes = result.fe_codes[d];
    codes.resize(size_t(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      int32_t orig = fe[d][size_t(result.kept_rows[size_t(i)])];
      auto [it, inserted] = remap.emplace(orig, int32_t(remap.size()));
      codes[size_t(i)] = it->second;
    }
    result.fe_levels[d] = int64_t(remap.size());
    sizes[d].assign(remap.size(), 0);
    for (int32_t c : codes) sizes[d][size_t(c)] += 1;
  }

  if (fe.empty()) return result;

  if (fe.size() == 1) {
    // One dimension: a single pass is exact.
    demean_dimension(result.data, result.fe_codes[0], sizes[0], options.threads);
    result.iterations = 1;
    return result;
  }

  Eigen::MatrixXd previous;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    previous = result.data;
    for (size_t d = 0; d < fe.size(); ++d)
      demean_dimension(result.data, result.fe_codes[d], sizes[d], options.threads);
    result.iterations = iter;
    double delta = (result.data - previous).cwiseAbs().maxCoeff();
    if (delta < options.tol) return result;
  }
  throw EstimationError("fixed-effect absorption did not converge within " +
                        std::to_string(options.max_iterations) + " sweeps");
}

// ---------------------------------------------------------------------------
// Shared estimation internals.

namespace {

// Order-preserving greedy selection of linearly independent columns via
// modified Gram-Schmidt: a column is kept when its residual norm, after
// projecting out the already-kept columns, exceeds tol times its original
// norm.  Earlier columns win ties, so callers control what gets dropped by
// ordering the design.
std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& A, double tol) {
  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd basis(A.rows(), A.cols());
  Eigen::Index b = 0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    Eigen::VectorXd v = A.col(j);
    double orig = v.norm();
    if (orig == 0.0) continue;
    for (Eigen::Index q = 0; q < b; ++q) v -= basis.col(q).dot(v) * basis.col(q);
    // Second pass improves orthogonality for near-collinear columns.
    for (Eigen::Index q = 0; q < b; ++q) v -= basis.col(q).dot(v) * basis.col(q);
    if (v.norm() > tol * orig) {
      basis.col(b++) = v / v.norm();
      kept.push_back(j);
    }
  }
  return kept;
}

struct Prepared {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;                 // resolved regressor columns, absorbed
  std::vector<std::string> names;    // aligned with X's columns
  std::vector<int32_t> cluster;      // dense codes over kept rows
  int64_t n_clusters = 0;
  int64_t fe_dof = 0;
  int64_t singletons = 0;
  int iterations = 0;
};

Prepared prepare(const DataTable& full, const std::string& outcome,
                 std::vector<std::string> columns, const std::vector<std::string>& fe_exprs,
                 const std::string& cluster_expr, const std::string& filter,
                 const AbsorbOptions& aopts) {
  if (outcome.empty()) throw ConfigError("spec needs an outcome column");
  std::vector<char> mask = full.eval_filter(filter);
  DataTable t = full.filter(mask);
  if (t.n_rows() == 0) throw EstimationError("sample filter removed every row");

  const size_t k = columns.size();
  Eigen::MatrixXd M(Eigen::Index(t.n_rows()), Eigen::Index(1 + k));
  M.col(0) = resolve_numeric(t, outcome);
  for (size_t j = 0; j < k; ++j)
    M.col(Eigen::Index(1 + j)) = columns[j] == "const"
                                     ? Eigen::VectorXd::Ones(Eigen::Index(t.n_rows()))
                                     : resolve_numeric(t, columns[j]);

  std::vector<std::vector<int32_t>> fe;
  fe.reserve(fe_exprs.size());
  for (const auto& e : fe_exprs) fe.push_back(resolve_categorical(t, e));

  AbsorbResult ab = absorb_fixed_effects(M, std::move(fe), aopts);

  Prepared p;
  p.y = ab.data.col(0);
  p.X = ab.data.rightCols(Eigen::Index(k));
  p.names = std::move(columns);
  p.singletons = ab.singletons_dropped;
  p.iterations = ab.iterations;
  if (!ab.fe_levels.empty()) {
    p.fe_dof = -(int64_t(ab.fe_levels.size()) - 1);
    for (int64_t l : ab.fe_levels) p.fe_dof += l;
  }

  if (cluster_expr.empty()) {
    // Every observation its own cluster: CR1 coincides with the
    // heteroskedasticity-robust HC1 covariance.
    p.cluster.resize(ab.kept_rows.size());
    std::iota(p.cluster.begin(), p.cluster.end(), 0);
    p.n_clusters = int64_t(ab.kept_rows.size());
  } else {
    std::vector<int32_t> raw = resolve_categorical(t, cluster_expr);
    std::unordered_map<int32_t, int32_t> remap;
    p.cluster.reserve(ab.kept_rows.size());
    for (int64_t row : ab.kept_rows) {
      auto [it, inserted] = remap.emplace(raw[size_t(row)], int32_t(remap.size()));
      p.cluster.push_back(it->second);
    }
    p.n_clusters = int64_t(remap.size());
  }
  return p;
}

struct Solved {
  std::vector<Eigen::Index> kept;
  std::vector<std::string> dropped;
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;
  Eigen::VectorXd residuals;
  double r2_within = 0;
  int64_t K = 0;
};

// Cluster-robust least squares.  `design` supplies the coefficients and the
// covariance bread; `structural` supplies the residuals (identical to design
// for plain OLS, the un-projected regressors for two-stage estimation).
Solved solve_cluster(const Eigen::MatrixXd& design, const Eigen::MatrixXd& structural,
                     const Eigen::VectorXd& y, const std::vector<std::string>& names,
                     const std::vector<int32_t>& cluster, int64_t n_clusters, int64_t fe_dof,
                     double rank_tol) {
  Solved s;
  s.kept = independent_columns(design, rank_tol);
  if (s.kept.empty()) throw EstimationError("no linearly independent regressors remain");
  for (Eigen::Index j = 0; j < design.cols(); ++j)
    if (std::find(s.kept.begin(), s.kept.end(), j) == s.kept.end())
      s.dropped.push_back(names[size_t(j)]);

  const Eigen::Index n = design.rows();
  const Eigen::Index k = Eigen::Index(s.kept.size());
  Eigen::MatrixXd D(n, k), R(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    D.col(j) = design.col(s.kept[size_t(j)]);
    R.col(j) = structural.col(s.kept[size_t(j)]);
  }

  s.beta = D.householderQr().solve(y);
  s.residuals = y - R * s.beta;

  const int64_t N = int64_t(n);
  const int64_t G = n_clusters;
  s.K = k + fe_dof;
  if (G < 2) throw EstimationError("need at least two clusters for cluster-robust errors");
  if (N - s.K <= 0) throw EstimationError("no residual degrees of freedom (N <= K)");

  Eigen::MatrixXd xtx = D.transpose() * D;
  Eigen::MatrixXd bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));

  // Cluster score sums, accumulated in row order.
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(Eigen::Index(G), k);
  for (Eigen::Index i = 0; i < n; ++i)
    scores.row(cluster[size_t(i)]) += s.residuals[i] * D.row(i);
  Eigen::MatrixXd meat = scores.transpose() * scores;

  double c = (double(G) / double(G - 1)) * (double(N - 1) / double(N - s.K));
  s.vcov = c * bread * meat * bread;

  double mean_y = y.mean();
  double tss = (y.array() - mean_y).square().sum();
  double ssr = s.residuals.squaredNorm();
  s.r2_within = tss > 0.0 ? 1.0 - ssr / tss : 0.0;
  return s;
}

// Wald statistic beta' V^-1 beta over a coefficient subset.
double wald_stat(const Eigen::VectorXd& beta, const Eigen::MatrixXd& vcov,
                 const std::vector<Eigen::Index>& subset) {
  const Eigen::Index q = Eigen::Index(subset.size());
  Eigen::VectorXd b(q);
  Eigen::MatrixXd V(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    b[i] = beta[subset[size_t(i)]];
    for (Eigen::Index j = 0; j < q; ++j) V(i, j) = vcov(subset[size_t(i)], subset[size_t(j)]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
  if (ldlt.info() != Eigen::Success) throw EstimationError("singular covariance in Wald test");
  return b.dot(ldlt.solve(b));
}

FitResult finish(const Prepared& p, const Solved& s, std::vector<std::string> kept_names) {
  FitResult r;
  r.n_obs = p.y.size();
  r.n_clusters = p.n_clusters;
  r.singletons_dropped = p.singletons;
  r.absorb_iterations = p.iterations;
  r.dof_model = s.K;
  r.r2_within = s.r2_within;
  r.dropped_collinear = s.dropped;
  r.vcov = s.vcov;
  r.coefficients.resize(kept_names.size());
  for (size_t j = 0; j < kept_names.size(); ++j) {
    Coefficient& c = r.coefficients[j];
    c.name = std::move(kept_names[j]);
    c.estimate = s.beta[Eigen::Index(j)];
    c.std_error = std::sqrt(std::max(0.0, s.vcov(Eigen::Index(j), Eigen::Index(j))));
    c.t_stat = c.std_error > 0 ? c.estimate / c.std_error : 0.0;
    c.p_value = c.std_error > 0 ? 2.0 * (1.0 - normal_cdf(std::abs(c.t_stat))) : 0.0;
  }
  std::vector<Eigen::Index> slopes;
  for (size_t j = 0; j < r.coefficients.size(); ++j)
    if (r.coefficients[j].name != "const") slopes.push_back(Eigen::Index(j));
  if (!slopes.empty()) {
    try {
      r.joint_f = wald_stat(s.beta, s.vcov, slopes) / double(slopes.size());
    } catch (const EstimationError&) {
      r.joint_f = 0.0;
    }
  }
  return r;
}

std::vector<std::string> with_intercept(std::vector<std::string> cols,
                                        const std::vector<std::string>& fe) {
  if (fe.empty()) cols.push_back("const");
  return cols;
}

}  // namespace

const Coefficient& FitResult::coef(std::string_view name) const {
  for (const auto& c : coefficients)
    if (c.name == name) return c;
  throw EstimationError("no coefficient named '" + std::string(name) + "' in fit");
}

// ---------------------------------------------------------------------------

FitResult ols(const RegressionSpec& spec, const DataTable& table, const FitOptions& opts) {
  if (!spec.endogenous.empty())
    throw ConfigError("spec has endogenous regressors; use tsls()");
  if (spec.exogenous.empty() && !spec.fixed_effects.empty())
    throw ConfigError("no regressors to estimate");

  Prepared p = prepare(table, spec.outcome, with_intercept(spec.exogenous, spec.fixed_effects),
                       spec.fixed_effects, spec.cluster, spec.sample_filter, opts.absorb);
  Solved s = solve_cluster(p.X, p.X, p.y, p.names, p.cluster, p.n_clusters, p.fe_dof,
                           opts.rank_tol);
  std::vector<std::string> kept_names;
  for (Eigen::Index j : s.kept) kept_names.push_back(p.names[size_t(j)]);
  return finish(p, s, std::move(kept_names));
}

namespace {

// Everything the 2SLS family shares: resolved blocks, first stages, and
// instrument bookkeeping.
struct TslsParts {
  Prepared p;
  std::vector<std::string> exo_names, endo_names, z_names;  // after collinearity drops
  std::vector<std::string> dropped;                         // from exo/Z screening
  Eigen::MatrixXd Xexo, Xendo, Z;
  Eigen::MatrixXd W;      // [Z | Xexo]
  std::vector<std::string> w_names;
  Eigen::MatrixXd Ehat;   // fitted endogenous columns
  std::vector<Solved> first;  // per endogenous column, over W
  std::map<std::string, double> partial_f;
};

TslsParts build_tsls(const RegressionSpec& spec, const DataTable& table, const FitOptions& opts) {
  if (spec.endogenous.empty()) throw ConfigError("spec has no endogenous regressors");
  if (spec.instruments.empty()) throw ConfigError("spec has no instruments");
  if (spec.instruments.size() < spec.endogenous.size())
    throw ConfigError("under-identified: fewer instruments than endogenous regressors");

  std::vector<std::string> exo = with_intercept(spec.exogenous, spec.fixed_effects);
  std::vector<std::string> columns = exo;
  columns.insert(columns.end(), spec.endogenous.begin(), spec.endogenous.end());
  columns.insert(columns.end(), spec.instruments.begin(), spec.instruments.end());

  TslsParts parts;
  parts.p = prepare(table, spec.outcome, columns, spec.fixed_effects, spec.cluster,
                    spec.sample_filter, opts.absorb);
  const Eigen::Index ne = Eigen::Index(exo.size());
  const Eigen::Index me = Eigen::Index(spec.endogenous.size());
  const Eigen::Index nz = Eigen::Index(spec.instruments.size());
  Eigen::MatrixXd Xexo_all = parts.p.X.leftCols(ne);
  parts.Xendo = parts.p.X.middleCols(ne, me);
  Eigen::MatrixXd Z_all = parts.p.X.rightCols(nz);

  // Screen the exogenous block, then the instruments against [exo | Z]:
  // exogenous columns take priority, instruments only add what is new.
  std::vector<Eigen::Index> exo_keep = independent_columns(Xexo_all, opts.rank_tol);
  for (Eigen::Index j = 0; j < ne; ++j)
    if (std::find(exo_keep.begin(), exo_keep.end(), j) == exo_keep.end())
      parts.dropped.push_back(exo[size_t(j)]);
  Eigen::MatrixXd Xexo(parts.p.X.rows(), Eigen::Index(exo_keep.size()));
  for (size_t j = 0; j < exo_keep.size(); ++j) {
    Xexo.col(Eigen::Index(j)) = Xexo_all.col(exo_keep[j]);
    parts.exo_names.push_back(exo[size_t(exo_keep[j])]);
  }

  Eigen::MatrixXd screen(parts.p.X.rows(), Xexo.cols() + nz);
  screen << Xexo, Z_all;
  std::vector<Eigen::Index> screen_keep = independent_columns(screen, opts.rank_tol);
  std::vector<Eigen::Index> z_keep;
  for (Eigen::Index j : screen_keep)
    if (j >= Xexo.cols()) z_keep.push_back(j - Xexo.cols());
  for (Eigen::Index j = 0; j < nz; ++j)
    if (std::find(z_keep.begin(), z_keep.end(), j) == z_keep.end())
      parts.dropped.push_back(spec.instruments[size_t(j)]);
  if (z_keep.empty())
    throw EstimationError("every instrument is collinear with the exogenous regressors");
  if (Eigen::Index(z_keep.size()) < me)
    throw EstimationError("under-identified after collinearity drops: " +
                          std::to_string(z_keep.size()) + " usable instruments for " +
                          std::to_string(me) + " endogenous regressors");
  Eigen::MatrixXd Z(parts.p.X.rows(), Eigen::Index(z_keep.size()));
  for (size_t j = 0; j < z_keep.size(); ++j) {
    Z.col(Eigen::Index(j)) = Z_all.col(z_keep[j]);
    parts.z_names.push_back(spec.instruments[size_t(z_keep[j])]);
  }

  parts.Xexo = std::move(Xexo);
  parts.Z = std::move(Z);
  parts.endo_names = spec.endogenous;

  parts.W.resize(parts.p.X.rows(), parts.Z.cols() + parts.Xexo.cols());
  parts.W << parts.Z, parts.Xexo;
  parts.w_names = parts.z_names;
  parts.w_names.insert(parts.w_names.end(), parts.exo_names.begin(), parts.exo_names.end());

  // First stage per endogenous column, with the instrument-strength Wald.
  std::vector<Eigen::Index> z_subset(size_t(parts.Z.cols()));
  std::iota(z_subset.begin(), z_subset.end(), 0);
  parts.Ehat.resize(parts.p.X.rows(), me);
  for (Eigen::Index j = 0; j < me; ++j) {
    Solved fs = solve_cluster(parts.W, parts.W, parts.Xendo.col(j), parts.w_names,
                              parts.p.cluster, parts.p.n_clusters, parts.p.fe_dof, 0.0);
    parts.Ehat.col(j) = parts.W * fs.beta;
    double wald = wald_stat(fs.beta, fs.vcov, z_subset);
    parts.partial_f[parts.endo_names[size_t(j)]] = wald / double(parts.Z.cols());
    parts.first.push_back(std::move(fs));
  }
  return parts;
}

std::string partial_f_text(const std::map<std::string, double>& pf) {
  std::string out;
  for (const auto& [name, f] : pf) {
    if (!out.empty()) out += ", ";
    out += name + "=" + std::to_string(f);
  }
  return out;
}

}  // namespace

FitResult tsls(const RegressionSpec& spec, const DataTable& table, const FitOptions& opts) {
  if (spec.endogenous.empty()) return ols(spec, table, opts);
  TslsParts parts = build_tsls(spec, table, opts);

  // The fitted endogenous columns must add independent variation beyond the
  // exogenous block; if not, the instruments are too weak to identify beta.
  const Eigen::Index me = parts.Ehat.cols();
  Eigen::MatrixXd check(parts.p.X.rows(), parts.Xexo.cols() + me);
  check << parts.Xexo, parts.Ehat;
  std::vector<Eigen::Index> check_keep = independent_columns(check, opts.rank_tol);
  for (Eigen::Index j = 0; j < me; ++j) {
    Eigen::Index pos = parts.Xexo.cols() + j;
    if (std::find(check_keep.begin(), check_keep.end(), pos) == check_keep.end())
      throw EstimationError("weak identification: fitted '" + parts.endo_names[size_t(j)] +
                            "' is collinear with the exogenous regressors (partial F: " +
                            partial_f_text(parts.partial_f) + ")");
  }

  Eigen::MatrixXd Q(parts.p.X.rows(), me + parts.Xexo.cols());
  Q << parts.Ehat, parts.Xexo;
  Eigen::MatrixXd R(parts.p.X.rows(), me + parts.Xexo.cols());
  R << parts.Xendo, parts.Xexo;
  std::vector<std::string> names = parts.endo_names;
  names.insert(names.end(), parts.exo_names.begin(), parts.exo_names.end());

  Solved s = solve_cluster(Q, R, parts.p.y, names, parts.p.cluster, parts.p.n_clusters,
                           parts.p.fe_dof, 0.0);
  std::vector<std::string> kept_names;
  for (Eigen::Index j : s.kept) kept_names.push_back(names[size_t(j)]);
  FitResult r = finish(parts.p, s, std::move(kept_names));
  r.dropped_collinear.insert(r.dropped_collinear.end(), parts.dropped.begin(),
                             parts.dropped.end());
  r.partial_f = parts.partial_f;
  return r;
}

std::map<std::string, FitResult> first_stage(const RegressionSpec& spec, const DataTable& table,
                                             const FitOptions& opts) {
  TslsParts parts = build_tsls(spec, table, opts);
  std::map<std::string, FitResult> out;
  for (size_t j = 0; j < parts.endo_names.size(); ++j) {
    const Solved& s = parts.first[j];
    std::vector<std::string> kept_names;
    for (Eigen::Index idx : s.kept) kept_names.push_back(parts.w_names[size_t(idx)]);
    Prepared stage = parts.p;  // same sample, clusters, and absorbed dof
    stage.y = parts.Xendo.col(Eigen::Index(j));
    FitResult r = finish(stage, s, std::move(kept_names));
    r.partial_f[parts.endo_names[j]] = parts.partial_f[parts.endo_names[j]];
    out.emplace(parts.endo_names[j], std::move(r));
  }
  return out;
}

FitResult reduced_form(const RegressionSpec& spec, const DataTable& table,
                       const FitOptions& opts) {
  TslsParts parts = build_tsls(spec, table, opts);
  Solved s = solve_cluster(parts.W, parts.W, parts.p.y, parts.w_names, parts.p.cluster,
                           parts.p.n_clusters, parts.p.fe_dof, 0.0);
  std::vector<std::string> kept_names;
  for (Eigen::Index j : s.kept) kept_names.push_back(parts.w_names[size_t(j)]);
  FitResult r = finish(parts.p, s, std::move(kept_names));
  r.dropped_collinear.insert(r.dropped_collinear.end(), parts.dropped.begin(),
                             parts.dropped.end());
  return r;
}

// ---------------------------------------------------------------------------

std::vector<EventStudyCurve> event_study(const DataTable& table, const std::string& outcome,
                                         const std::string& period, int base_period,
                                         std::span<const std::vector<std::string>> fe_sets,
                                         const std::string& cluster, const FitOptions& opts) {
  auto raw = table.numeric(period);
  std::vector<int> periods;
  for (double v : raw) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
      throw ConfigError("period column '" + period + "' holds non-integer values");
    periods.push_back(int(r));
  }
  std::vector<int> unique_periods = periods;
  std::sort(unique_periods.begin(), unique_periods.end());
  unique_periods.erase(std::unique(unique_periods.begin(), unique_periods.end()),
                       unique_periods.end());
  if (std::find(unique_periods.begin(), unique_periods.end(), base_period) ==
      unique_periods.end())
    throw ConfigError("base period " + std::to_string(base_period) + " not present");
  if (unique_periods.size() < 2) throw ConfigError("event study needs at least two periods");

  // Indicator column per non-base period.
  DataTable work = table;
  std::vector<int> coef_periods;
  std::vector<std::string> dummy_names;
  for (int p : unique_periods) {
    if (p == base_period) continue;
    coef_periods.push_back(p);
    std::string name = "period_" + std::to_string(p);
    std::vector<double> dummy(table.n_rows());
    for (size_t i = 0; i < periods.size(); ++i) dummy[i] = periods[i] == p ? 1.0 : 0.0;
    work.add_numeric(name, std::move(dummy));
    dummy_names.push_back(std::move(name));
  }

  std::vector<EventStudyCurve> out;
  for (const auto& fe_set : fe_sets) {
    RegressionSpec spec;
    spec.outcome = outcome;
    spec.exogenous = dummy_names;
    spec.fixed_effects = fe_set;
    spec.cluster = cluster;
    FitResult fit = ols(spec, work, opts);
    EventStudyCurve curve;
    curve.fixed_effects = fe_set;
    curve.base_period = base_period;
    curve.periods = coef_periods;
    for (size_t j = 0; j < coef_periods.size(); ++j)
      curve.coefficients.push_back(fit.coef(dummy_names[j]));
    out.push_back(std::move(curve));
  }
  return out;
}

ShiftReport per_unit_shift(const DataTable& table, const std::string& outcome,
                           const std::string& unit, const std::string& period,
                           double cut_period) {
  auto y = table.numeric(outcome);
  auto p = table.numeric(period);
  auto codes = table.codes(unit);
  const auto& levels = table.levels(unit);

  struct Acc {
    double before = 0, after = 0;
    int64_t n_before = 0, n_after = 0;
  };
  std::vector<Acc> acc(levels.size());
  for (size_t i = 0; i < y.size(); ++i) {
    Acc& a = acc[size_t(codes[i])];
    if (p[i] < cut_period) {
      a.before += y[i];
      ++a.n_before;
    } else {
      a.after += y[i];
      ++a.n_after;
    }
  }

  ShiftReport report;
  std::vector<size_t> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return levels[a] < levels[b]; });
  for (size_t idx : order) {
    const Acc& a = acc[idx];
    if (a.n_before == 0 && a.n_after == 0) continue;  // level unused after filtering
    if (a.n_before == 0 || a.n_after == 0) {
      ++report.units_excluded_one_sided;
      continue;
    }
    UnitShift shift;
    shift.unit = levels[idx];
    shift.before_mean = a.before / double(a.n_before);
    shift.after_mean = a.after / double(a.n_after);
    shift.shift = shift.after_mean - shift.before_mean;
    shift.n_before = a.n_before;
    shift.n_after = a.n_after;
    report.shifts.push_back(std::move(shift));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Plain polynomial fit with HC1 errors; returns (intercept, variance of
// intercept, n).
struct SideFit {
  double intercept = 0;
  double var_intercept = 0;
  int64_t n = 0;
};

SideFit fit_side(const std::vector<double>& x, const std::vector<double>& y, int order) {
  const Eigen::Index n = Eigen::Index(x.size());
  const Eigen::Index k = Eigen::Index(order + 1);
  if (n < k + 1)
    throw EstimationError("too few observations (" + std::to_string(n) +
                          ") for a side of the discontinuity fit");
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      X(i, j) = v;
      v *= x[size_t(i)];
    }
    Y[i] = y[size_t(i)];
  }
  Eigen::VectorXd beta = X.householderQr().solve(Y);
  Eigen::VectorXd u = Y - X * beta;
  Eigen::MatrixXd bread = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i)
    meat += u[i] * u[i] * X.row(i).transpose() * X.row(i);
  double c = double(n) / double(n - k);
  Eigen::MatrixXd V = c * bread * meat * bread;
  return SideFit{beta[0], V(0, 0), int64_t(n)};
}

}  // namespace

RddResult rdd(std::span<const std::pair<Date, double>> daily_series, const Date& cutoff,
              int bandwidth_days, int polynomial_order) {
  if (bandwidth_days < 1) throw ConfigError("bandwidth must be at least one day");
  if (polynomial_order < 0) throw ConfigError("polynomial order must be non-negative");
  int64_t cut = days_from_civil(cutoff);
  std::vector<double> xl, yl, xr, yr;
  for (const auto& [date, value] : daily_series) {
    double x = double(days_from_civil(date) - cut);
    if (std::abs(x) > double(bandwidth_days)) continue;
    if (x < 0) {
      xl.push_back(x);
      yl.push_back(value);
    } else {  // the cutoff day itself belongs to the right side
      xr.push_back(x);
      yr.push_back(value);
    }
  }
  SideFit left = fit_side(xl, yl, polynomial_order);
  SideFit right = fit_side(xr, yr, polynomial_order);

  RddResult r;
  r.left_intercept = left.intercept;
  r.right_intercept = right.intercept;
  r.jump = right.intercept - left.intercept;
  r.std_error = std::sqrt(left.var_intercept + right.var_intercept);
  r.z = r.std_error > 0 ? r.jump / r.std_error : 0.0;
  r.p_value = r.std_error > 0 ? 2.0 * (1.0 - normal_cdf(std::abs(r.z))) : 0.0;
  r.n_left = left.n;
  r.n_right = right.n;
  r.bandwidth_days = bandwidth_days;
  r.polynomial_order = polynomial_order;
  return r;
}

}  // namespace polrhet::econest
