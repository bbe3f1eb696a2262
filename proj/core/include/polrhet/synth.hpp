#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polrhet/corpus.hpp"
#include "polrhet/rhetoric.hpp"
#include "polrhet/table.hpp"

namespace polrhet::synth {

// Deterministic generators used for tests, benchmarks, and pipeline
// rehearsals.  Every generator is a pure function of its config (including
// the seed): identical configs give byte-identical outputs on every platform.

// ---------------------------------------------------------------------------
// Synthetic tweet corpus with known gold styles.

struct CorpusDGP {
  uint64_t seed = 1;
  size_t n_docs = 1000;
  size_t n_politicians = 50;
  // Class prior over {blame, none, merit}.
  std::array<double, 3> class_priors = {0.20, 0.64, 0.16};
  size_t vocab_size = 300;   // filler vocabulary ("w0", "w1", ...)
  int min_tokens = 8;
  int max_tokens = 18;
  double marker_rate = 0.95;  // chance a styled doc carries class markers
  double leak_rate = 0.01;    // chance an unstyled doc carries a stray marker
  Date start{2012, 1, 1};
  Date end{2023, 7, 11};
};

struct SyntheticCorpus {
  std::vector<corpus::Tweet> tweets;     // ids "t000001"... in draw order
  std::vector<rhetoric::Style> styles;   // gold label per tweet
  std::vector<corpus::Politician> roster;
};

SyntheticCorpus gen_corpus(const CorpusDGP& dgp);

// Marker vocabularies planted by gen_corpus (exposed for tests).
std::span<const std::string> blame_markers();
std::span<const std::string> merit_markers();

// ---------------------------------------------------------------------------
// Grid panel with pairwise-interacted fixed effects, mirroring the
// unit x group x period designs the estimators face.

struct PanelDGP {
  uint64_t seed = 1;
  size_t n_units = 30;
  size_t n_groups = 40;
  size_t n_periods = 24;
  double beta_x1 = 0.5;
  double beta_x2 = -0.2;
  double fe_sd = 1.0;     // sd of every fixed-effect draw
  double noise_sd = 1.0;
  bool pairwise_fe = true;  // unit-group, unit-period, and group-period effects
};

struct SyntheticPanel {
  DataTable table;  // unit/group/period categorical; x1, x2, y numeric
  double beta_x1 = 0;
  double beta_x2 = 0;
};

SyntheticPanel gen_panel(const PanelDGP& dgp);

// ---------------------------------------------------------------------------
// Endogenous-regressor draws for inference rehearsals:
//   z ~ N(0,1);  x = pi*z + v;  y = beta*x + u
// with (u, v) jointly normal, sd sigma, correlation rho.

struct IvDraws {
  std::vector<double> y, x, z;
  double beta = 0;
};

IvDraws gen_iv_draws(size_t n, double beta, double rho, double pi, double sigma, uint64_t seed);

// ---------------------------------------------------------------------------
// Random fixed-effect design for estimator cross-checks: X standard normal,
// additive group effects per dimension, gaussian noise.

struct FeDesign {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::vector<int32_t>> fe;
  Eigen::VectorXd beta;  // true slopes on X
};

FeDesign gen_fe_design(uint64_t seed, size_t n, size_t k, std::span<const size_t> levels);

}  // namespace polrhet::synth
