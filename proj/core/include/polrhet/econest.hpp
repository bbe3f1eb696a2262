#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polrhet/dates.hpp"
#include "polrhet/table.hpp"

namespace polrhet::econest {

// ---------------------------------------------------------------------------
// Regression specification.
//
// Column references are expressions: a bare name, or a product "a x b" of
// numeric columns.  Fixed-effect and cluster expressions combine categorical
// columns the same way ("politician x county" is the interacted dimension).
// With an empty fixed_effects list an intercept regressor is added
// automatically under the name "const".  An empty cluster treats every
// observation as its own cluster (heteroskedasticity-robust errors).

struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> exogenous;
  std::vector<std::string> endogenous;
  std::vector<std::string> instruments;
  std::vector<std::string> fixed_effects;
  std::string cluster;
  std::string sample_filter;  // see DataTable::eval_filter
};

RegressionSpec spec_from_json(const std::string& json_text);
RegressionSpec read_spec(const std::filesystem::path& path);
std::string spec_to_json(const RegressionSpec& spec);

// ---------------------------------------------------------------------------
// Fixed-effect absorption: alternating within-group demeaning across the
// fixed-effect dimensions until the largest cell change in a full sweep
// falls below tol.  A single dimension needs exactly one pass.
//
// Observations that are alone in a group of any dimension carry no
// within-group information; they are dropped iteratively (removals can
// create new singletons) before demeaning.

struct AbsorbOptions {
  double tol = 1e-8;
  int max_iterations = 10000;
  int threads = 1;  // parallelism over columns; results are identical for any value
};

struct AbsorbResult {
  Eigen::MatrixXd data;                        // residualized columns, kept rows
  std::vector<int64_t> kept_rows;              // indices into the input rows
  std::vector<std::vector<int32_t>> fe_codes;  // recoded densely over kept rows
  std::vector<int64_t> fe_levels;              // level count per dimension
  int iterations = 0;
  int64_t singletons_dropped = 0;
};

AbsorbResult absorb_fixed_effects(const Eigen::MatrixXd& data,
                                  std::vector<std::vector<int32_t>> fe,
                                  const AbsorbOptions& options = {});

// ---------------------------------------------------------------------------
// Estimation results.

struct Coefficient {
  std::string name;
  double estimate = 0;
  double std_error = 0;
  double t_stat = 0;
  double p_value = 0;  // two-sided, normal reference
};

struct FitResult {
  std::vector<Coefficient> coefficients;
  Eigen::MatrixXd vcov;  // cluster-robust, over coefficients in order
  int64_t n_obs = 0;     // rows used after filter and singleton drop
  int64_t n_clusters = 0;
  int64_t dof_model = 0;  // regressor rank + absorbed fixed-effect dof
  int64_t singletons_dropped = 0;
  int absorb_iterations = 0;
  double r2_within = 0;
  double joint_f = 0;  // Wald/q over reported slopes
  std::vector<std::string> dropped_collinear;
  // First-stage strength per endogenous regressor: cluster-robust Wald test
  // of the excluded instruments divided by their count.
  std::map<std::string, double> partial_f;

  const Coefficient& coef(std::string_view name) const;
};

struct FitOptions {
  AbsorbOptions absorb;
  double rank_tol = 1e-9;  // relative pivot threshold for collinearity drops
};

// OLS with absorbed fixed effects and CR1 cluster-robust covariance
// (small-sample factor G/(G-1) * (N-1)/(N-K)).
FitResult ols(const RegressionSpec& spec, const DataTable& table, const FitOptions& opts = {});

// Two-stage least squares: endogenous columns are replaced by their
// projections on [instruments, exogenous] (all within-transformed); the
// covariance uses structural residuals.  Degenerates to ols() when the
// endogenous set is empty.
FitResult tsls(const RegressionSpec& spec, const DataTable& table, const FitOptions& opts = {});

// First-stage regressions, one per endogenous column.
std::map<std::string, FitResult> first_stage(const RegressionSpec& spec, const DataTable& table,
                                             const FitOptions& opts = {});

// Outcome regressed directly on [instruments, exogenous].
FitResult reduced_form(const RegressionSpec& spec, const DataTable& table,
                       const FitOptions& opts = {});

// ---------------------------------------------------------------------------
// Event study: outcome on indicator columns for every period except the base,
// re-estimated under each fixed-effect set to show how the path composes.

struct EventStudyCurve {
  std::vector<std::string> fixed_effects;
  int base_period = 0;
  std::vector<int> periods;               // every period except the base
  std::vector<Coefficient> coefficients;  // aligned with `periods`
};

std::vector<EventStudyCurve> event_study(const DataTable& table, const std::string& outcome,
                                         const std::string& period,
                                         int base_period,
                                         std::span<const std::vector<std::string>> fe_sets,
                                         const std::string& cluster,
                                         const FitOptions& opts = {});

// Per-unit before/after mean shift; units observed on one side only are
// excluded and counted.
struct UnitShift {
  std::string unit;
  double before_mean = 0;
  double after_mean = 0;
  double shift = 0;
  int64_t n_before = 0;
  int64_t n_after = 0;
};

struct ShiftReport {
  std::vector<UnitShift> shifts;  // sorted by unit
  int64_t units_excluded_one_sided = 0;
};

ShiftReport per_unit_shift(const DataTable& table, const std::string& outcome,
                           const std::string& unit, const std::string& period,
                           double cut_period);

// ---------------------------------------------------------------------------
// Regression-discontinuity check on a daily series: separate local
// polynomial fits on each side of the cutoff (cutoff day on the right),
// uniform kernel within the bandwidth, heteroskedasticity-robust standard
// error on the intercept jump.

struct RddResult {
  double jump = 0;
  double std_error = 0;
  double z = 0;
  double p_value = 0;
  double left_intercept = 0;
  double right_intercept = 0;
  int64_t n_left = 0;
  int64_t n_right = 0;
  int bandwidth_days = 0;
  int polynomial_order = 1;
};

RddResult rdd(std::span<const std::pair<Date, double>> daily_series, const Date& cutoff,
              int bandwidth_days = 90, int polynomial_order = 1);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace polrhet::econest
