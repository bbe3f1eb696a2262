#include "polrhet/synth.hpp"

#include <algorithm>
#include <cmath>

#include "polrhet/errors.hpp"
#include "polrhet/rng.hpp"

namespace polrhet::synth {

namespace {

const std::vector<std::string> kBlameMarkers = {"blame", "blames",  "fault",
                                                "ruined", "wrecked", "sabotaged"};
const std::vector<std::string> kMeritMarkers = {"thanks", "credit",  "delivered",
                                                "secured", "achieved", "boosted"};

const char* kStates[] = {"AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA",
                         "HI", "ID", "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD",
                         "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
                         "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC",
                         "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY"};

std::string padded_id(const char* prefix, size_t i, int width) {
  std::string digits = std::to_string(i);
  std::string out = prefix;
  for (int k = int(digits.size()); k < width; ++k) out += '0';
  return out + digits;
}

}  // namespace

std::span<const std::string> blame_markers() { return kBlameMarkers; }
std::span<const std::string> merit_markers() { return kMeritMarkers; }

SyntheticCorpus gen_corpus(const CorpusDGP& dgp) {
  if (dgp.n_docs == 0 || dgp.n_politicians == 0) throw ConfigError("gen_corpus: empty sizes");
  if (dgp.min_tokens < 2 || dgp.max_tokens < dgp.min_tokens)
    throw ConfigError("gen_corpus: bad token-length range");
  double prior_sum = dgp.class_priors[0] + dgp.class_priors[1] + dgp.class_priors[2];
  if (std::abs(prior_sum - 1.0) > 1e-9)
    throw ConfigError("gen_corpus: class priors must sum to 1");
  if (!(dgp.start < dgp.end)) throw ConfigError("gen_corpus: empty date range");

  SyntheticCorpus out;
  Rng roster_rng(mix_seed(dgp.seed, "roster"));
  out.roster.reserve(dgp.n_politicians);
  for (size_t i = 0; i < dgp.n_politicians; ++i) {
    corpus::Politician p;
    p.id = padded_id("p", i, 3);
    p.party = i % 2 == 0 ? "D" : "R";
    p.state = kStates[i % std::size(kStates)];
    p.chamber = roster_rng.uniform() < 0.8 ? "house" : "senate";
    p.female = roster_rng.bernoulli(0.3);
    p.birth_year = 1940 + int(roster_rng.uniform_below(46));
    double lean = 0.2 + 0.6 * roster_rng.uniform();
    p.ideology = p.party == "D" ? -lean : lean;
    out.roster.push_back(std::move(p));
  }

  Rng rng(mix_seed(dgp.seed, "corpus"));
  int64_t t0 = days_from_civil(dgp.start) * 86400;
  int64_t t1 = days_from_civil(dgp.end) * 86400 + 86399;
  out.tweets.reserve(dgp.n_docs);
  out.styles.reserve(dgp.n_docs);
  for (size_t i = 0; i < dgp.n_docs; ++i) {
    size_t cls = rng.categorical(dgp.class_priors.data(), 3);
    rhetoric::Style style = cls == 0   ? rhetoric::Style::Blame
                            : cls == 1 ? rhetoric::Style::None
                                       : rhetoric::Style::Merit;

    int len = dgp.min_tokens + int(rng.uniform_below(uint64_t(dgp.max_tokens - dgp.min_tokens + 1)));
    std::vector<std::string> tokens(static_cast<size_t>(len));
    for (auto& tok : tokens) tok = "w" + std::to_string(rng.uniform_below(dgp.vocab_size));

    const std::vector<std::string>* markers = nullptr;
    if (style == rhetoric::Style::Blame) markers = &kBlameMarkers;
    if (style == rhetoric::Style::Merit) markers = &kMeritMarkers;
    if (markers && rng.uniform() < dgp.marker_rate) {
      int n_markers = 1 + int(rng.uniform_below(2));
      for (int m = 0; m < n_markers; ++m)
        tokens[size_t(rng.uniform_below(uint64_t(len)))] =
            (*markers)[size_t(rng.uniform_below(markers->size()))];
    } else if (!markers && rng.uniform() < dgp.leak_rate) {
      const auto& stray = rng.bernoulli(0.5) ? kBlameMarkers : kMeritMarkers;
      tokens[size_t(rng.uniform_below(uint64_t(len)))] =
          stray[size_t(rng.uniform_below(stray.size()))];
    }

    corpus::Tweet tweet;
    tweet.id = padded_id("t", i + 1, 6);
    tweet.politician_id = out.roster[size_t(rng.uniform_below(dgp.n_politicians))].id;
    tweet.timestamp = t0 + int64_t(rng.uniform_below(uint64_t(t1 - t0 + 1)));
    std::string text;
    for (size_t k = 0; k < tokens.size(); ++k) {
      if (k) text += ' ';
      text += tokens[k];
    }
    tweet.text = std::move(text);
    tweet.retweet_count = int64_t(rng.uniform_below(500));
    out.tweets.push_back(std::move(tweet));
    out.styles.push_back(style);
  }
  return out;
}

SyntheticPanel gen_panel(const PanelDGP& dgp) {
  if (dgp.n_units < 2 || dgp.n_groups < 2 || dgp.n_periods < 2)
    throw ConfigError("gen_panel: every axis needs at least two levels");
  const size_t n = dgp.n_units * dgp.n_groups * dgp.n_periods;

  Rng rng(mix_seed(dgp.seed, "panel"));
  std::vector<double> fe_ug(dgp.n_units * dgp.n_groups);
  std::vector<double> fe_up(dgp.n_units * dgp.n_periods);
  std::vector<double> fe_gp(dgp.n_groups * dgp.n_periods);
  if (dgp.pairwise_fe) {
    for (auto& v : fe_ug) v = rng.normal(0, dgp.fe_sd);
    for (auto& v : fe_up) v = rng.normal(0, dgp.fe_sd);
    for (auto& v : fe_gp) v = rng.normal(0, dgp.fe_sd);
  }

  std::vector<int32_t> unit(n), group(n), period(n);
  std::vector<double> x1(n), x2(n), y(n);
  size_t row = 0;
  for (size_t u = 0; u < dgp.n_units; ++u) {
    for (size_t g = 0; g < dgp.n_groups; ++g) {
      for (size_t p = 0; p < dgp.n_periods; ++p, ++row) {
        unit[row] = int32_t(u);
        group[row] = int32_t(g);
        period[row] = int32_t(p);
        x1[row] = rng.normal();
        x2[row] = rng.normal();
        double effects = 0.0;
        if (dgp.pairwise_fe) {
          effects = fe_ug[u * dgp.n_groups + g] + fe_up[u * dgp.n_periods + p] +
                    fe_gp[g * dgp.n_periods + p];
        }
        y[row] = dgp.beta_x1 * x1[row] + dgp.beta_x2 * x2[row] + effects +
                 rng.normal(0, dgp.noise_sd);
      }
    }
  }

  auto labels = [](const char* prefix, size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(padded_id(prefix, i, 3));
    return out;
  };

  SyntheticPanel panel;
  panel.beta_x1 = dgp.beta_x1;
  panel.beta_x2 = dgp.beta_x2;
  DataTable table(n);
  table.add_categorical_coded("unit", std::move(unit), labels("u", dgp.n_units));
  table.add_categorical_coded("group", std::move(group), labels("g", dgp.n_groups));
  table.add_categorical_coded("period", std::move(period), labels("m", dgp.n_periods));
  table.add_numeric("x1", std::move(x1));
  table.add_numeric("x2", std::move(x2));
  table.add_numeric("y", std::move(y));
  panel.table = std::move(table);
  return panel;
}

IvDraws gen_iv_draws(size_t n, double beta, double rho, double pi, double sigma, uint64_t seed) {
  if (n < 4) throw ConfigError("gen_iv_draws: need at least four observations");
  if (rho <= -1.0 || rho >= 1.0) throw ConfigError("gen_iv_draws: rho must lie in (-1, 1)");
  IvDraws out;
  out.beta = beta;
  out.y.resize(n);
  out.x.resize(n);
  out.z.resize(n);
  Rng rng(mix_seed(seed, "iv"));
  for (size_t i = 0; i < n; ++i) {
    double z = rng.normal();
    double u = rng.normal();
    // v = rho*u + sqrt(1-rho^2)*w makes corr(u, v) = rho.
    double v = rho * u + std::sqrt(1.0 - rho * rho) * rng.normal();
    double x = pi * z + sigma * v;
    out.z[i] = z;
    out.x[i] = x;
    out.y[i] = beta * x + sigma * u;
  }
  return out;
}

FeDesign gen_fe_design(uint64_t seed, size_t n, size_t k, std::span<const size_t> levels) {
  if (n == 0 || k == 0) throw ConfigError("gen_fe_design: empty design");
  FeDesign d;
  Rng rng(mix_seed(seed, "fe-design"));
  d.X.resize(Eigen::Index(n), Eigen::Index(k));
  d.beta.resize(Eigen::Index(k));
  for (Eigen::Index j = 0; j < d.beta.size(); ++j) d.beta[j] = rng.normal();
  for (Eigen::Index i = 0; i < d.X.rows(); ++i)
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) d.X(i, j) = rng.normal();

  d.fe.resize(levels.size());
  std::vector<std::vector<double>> effects(levels.size());
  for (size_t dim = 0; dim < levels.size(); ++dim) {
    if (levels[dim] < 1) throw ConfigError("gen_fe_design: dimension with no levels");
    d.fe[dim].resize(n);
    effects[dim].resize(levels[dim]);
    for (auto& e : effects[dim]) e = rng.normal();
    for (size_t i = 0; i < n; ++i) d.fe[dim][i] = int32_t(rng.uniform_below(levels[dim]));
  }

  d.y = d.X * d.beta;
  for (size_t i = 0; i < n; ++i) {
    for (size_t dim = 0; dim < levels.size(); ++dim)
      d.y[Eigen::Index(i)] += effects[dim][size_t(d.fe[dim][i])];
    d.y[Eigen::Index(i)] += rng.normal();
  }
  return d;
}

}  // namespace polrhet::synth
