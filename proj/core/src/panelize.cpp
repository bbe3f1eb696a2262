#include "polrhet/panelize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "polrhet/errors.hpp"

namespace polrhet::panelize {

namespace {

ShareCell make_share(int64_t hits, int64_t n) {
  ShareCell cell;
  cell.n = n;
  if (n == 0) return cell;
  double p = double(hits) / double(n);
  double half = 1.96 * std::sqrt(p * (1.0 - p) / double(n));
  cell.share = p;
  cell.ci_lo = std::max(0.0, p - half);
  cell.ci_hi = std::min(1.0, p + half);
  return cell;
}

void check_aligned(size_t a, size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": style/value count does not match tweets");
}

}  // namespace

std::vector<YearShares> yearly_shares(std::span<const corpus::Tweet> tweets,
                                      std::span<const rhetoric::Style> styles) {
  check_aligned(tweets.size(), styles.size(), "yearly_shares");
  std::map<int, std::array<int64_t, 3>> counts;  // year -> {n, blame, merit}
  for (size_t i = 0; i < tweets.size(); ++i) {
    auto& c = counts[tweets[i].date().year];
    c[0] += 1;
    if (styles[i] == rhetoric::Style::Blame) c[1] += 1;
    if (styles[i] == rhetoric::Style::Merit) c[2] += 1;
  }
  std::vector<YearShares> out;
  out.reserve(counts.size());
  for (const auto& [year, c] : counts) {
    YearShares ys;
    ys.year = year;
    ys.blame = make_share(c[1], c[0]);
    ys.merit = make_share(c[2], c[0]);
    out.push_back(ys);
  }
  return out;
}

CrowdingReport crowding_shares(std::span<const corpus::Tweet> tweets,
                               std::span<const rhetoric::Style> styles,
                               std::span<const double> sentiment,
                               std::span<const corpus::Presidency> presidencies,
                               double neutral_band) {
  check_aligned(tweets.size(), styles.size(), "crowding_shares");
  check_aligned(tweets.size(), sentiment.size(), "crowding_shares");
  if (neutral_band < 0) throw ConfigError("neutral_band must be non-negative");

  struct Acc {
    int64_t neg = 0, blame_in_neg = 0, pos = 0, merit_in_pos = 0;
  };
  std::map<std::string, Acc> acc;
  for (size_t i = 0; i < tweets.size(); ++i) {
    const corpus::Presidency* p = find_presidency(tweets[i].date(), presidencies);
    if (!p) continue;
    Acc& a = acc[p->name];
    if (sentiment[i] < -neutral_band) {
      a.neg += 1;
      if (styles[i] == rhetoric::Style::Blame) a.blame_in_neg += 1;
    } else if (sentiment[i] > neutral_band) {
      a.pos += 1;
      if (styles[i] == rhetoric::Style::Merit) a.merit_in_pos += 1;
    }
  }

  CrowdingReport report;
  for (const auto& p : presidencies) {
    auto it = acc.find(p.name);
    if (it == acc.end()) {
      report.omitted.push_back(p.name + " (no tweets)");
      continue;
    }
    const Acc& a = it->second;
    if (a.neg == 0) report.omitted.push_back(p.name + " (no negative tweets)");
    if (a.pos == 0) report.omitted.push_back(p.name + " (no positive tweets)");
    if (a.neg == 0 || a.pos == 0) continue;
    CrowdingCell cell;
    cell.presidency = p.name;
    cell.blame_in_negative = make_share(a.blame_in_neg, a.neg);
    cell.merit_in_positive = make_share(a.merit_in_pos, a.pos);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

GapReport polarization_gap(std::span<const corpus::Tweet> tweets,
                           std::span<const double> outcome,
                           const std::map<std::string, std::string>& politician_party,
                           std::span<const corpus::Presidency> presidencies) {
  check_aligned(tweets.size(), outcome.size(), "polarization_gap");
  struct Acc {
    double ruling = 0, opposition = 0;
    int64_t n_ruling = 0, n_opposition = 0;
  };
  std::map<std::string, Acc> acc;
  for (size_t i = 0; i < tweets.size(); ++i) {
    const corpus::Presidency* p = find_presidency(tweets[i].date(), presidencies);
    if (!p) continue;
    auto party = politician_party.find(tweets[i].politician_id);
    if (party == politician_party.end())
      throw ValidationError("no party for politician '" + tweets[i].politician_id + "'");
    Acc& a = acc[p->name];
    if (party->second == p->party) {
      a.ruling += outcome[i];
      a.n_ruling += 1;
    } else {
      a.opposition += outcome[i];
      a.n_opposition += 1;
    }
  }

  GapReport report;
  for (const auto& p : presidencies) {
    auto it = acc.find(p.name);
    if (it == acc.end() || it->second.n_ruling == 0 || it->second.n_opposition == 0) {
      report.omitted.push_back(p.name);
      continue;
    }
    const Acc& a = it->second;
    GapCell cell;
    cell.presidency = p.name;
    cell.ruling_mean = a.ruling / double(a.n_ruling);
    cell.opposition_mean = a.opposition / double(a.n_opposition);
    cell.gap = cell.ruling_mean - cell.opposition_mean;
    cell.n_ruling = a.n_ruling;
    cell.n_opposition = a.n_opposition;
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::vector<PoliticianMonthCell> politician_month_shares(std::span<const corpus::Tweet> tweets,
                                                         std::span<const rhetoric::Style> styles) {
  check_aligned(tweets.size(), styles.size(), "politician_month_shares");
  struct Acc {
    int64_t n = 0, blame = 0, merit = 0;
  };
  std::map<std::pair<std::string, YearMonth>, Acc> acc;
  for (size_t i = 0; i < tweets.size(); ++i) {
    Acc& a = acc[{tweets[i].politician_id, year_month(tweets[i].date())}];
    a.n += 1;
    if (styles[i] == rhetoric::Style::Blame) a.blame += 1;
    if (styles[i] == rhetoric::Style::Merit) a.merit += 1;
  }
  std::vector<PoliticianMonthCell> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    PoliticianMonthCell cell;
    cell.politician_id = key.first;
    cell.month = key.second;
    cell.n = a.n;
    cell.blame_share = double(a.blame) / double(a.n);
    cell.merit_share = double(a.merit) / double(a.n);
    cell.causal_share = double(a.blame + a.merit) / double(a.n);
    out.push_back(std::move(cell));
  }
  return out;
}

// ---------------------------------------------------------------------------

DonationsPanel::DonationsPanel(std::vector<std::string> politicians,
                               std::vector<std::string> counties,
                               std::vector<YearMonth> months)
    : politicians_(std::move(politicians)),
      counties_(std::move(counties)),
      months_(std::move(months)) {
  auto ensure_sorted_unique = [](auto& v, const char* what) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
      throw ValidationError(std::string("duplicate ") + what + " in panel axes");
    if (v.empty()) throw ValidationError(std::string("empty ") + what + " axis");
  };
  ensure_sorted_unique(politicians_, "politician");
  ensure_sorted_unique(counties_, "county");
  ensure_sorted_unique(months_, "month");
}

void DonationsPanel::for_each(const std::function<void(const Cell&)>& fn) const {
  for (size_t p = 0; p < politicians_.size(); ++p) {
    for (size_t c = 0; c < counties_.size(); ++c) {
      for (size_t m = 0; m < months_.size(); ++m) {
        Cell cell{&politicians_[p], &counties_[c], months_[m], 0.0, 0.0, 0.0, false};
        auto it = sparse_.find({int32_t(p), int32_t(c), int32_t(m)});
        if (it != sparse_.end()) {
          const Accum& a = it->second;
          double donors = double(a.donors.size());
          cell.log_revenue = std::log1p(a.revenue);
          cell.log_donors = std::log1p(donors);
          cell.log_avg = std::log1p(a.revenue / donors);
          cell.any = true;
        }
        fn(cell);
      }
    }
  }
}

DataTable DonationsPanel::to_table() const {
  const size_t n = n_cells();
  std::vector<int32_t> pol(n), county(n), month(n);
  std::vector<double> log_revenue(n), log_donors(n), log_avg(n), any(n);
  size_t i = 0;
  for_each([&](const Cell& cell) {
    pol[i] = int32_t(std::lower_bound(politicians_.begin(), politicians_.end(), *cell.politician) -
                     politicians_.begin());
    county[i] = int32_t(std::lower_bound(counties_.begin(), counties_.end(), *cell.county) -
                        counties_.begin());
    month[i] = int32_t(std::lower_bound(months_.begin(), months_.end(), cell.month) -
                       months_.begin());
    log_revenue[i] = cell.log_revenue;
    log_donors[i] = cell.log_donors;
    log_avg[i] = cell.log_avg;
    any[i] = cell.any ? 1.0 : 0.0;
    ++i;
  });
  std::vector<std::string> month_labels;
  month_labels.reserve(months_.size());
  for (const auto& m : months_) month_labels.push_back(format_year_month(m));
  DataTable table(n);
  table.add_categorical_coded("politician", std::move(pol), politicians_);
  table.add_categorical_coded("county", std::move(county), counties_);
  table.add_categorical_coded("month", std::move(month), std::move(month_labels));
  table.add_numeric("log_revenue", std::move(log_revenue));
  table.add_numeric("log_donors", std::move(log_donors));
  table.add_numeric("log_avg", std::move(log_avg));
  table.add_numeric("any", std::move(any));
  return table;
}

DonationsPanel donations_panel(std::span<const DonationRecord> records,
                               std::span<const std::string> politicians,
                               std::span<const std::string> counties,
                               std::span<const YearMonth> months,
                               const DonationsPanelOptions& options,
                               DonationsPanelReport* report) {
  if (options.cap <= 0) throw ConfigError("donation cap must be positive");
  DonationsPanel panel({politicians.begin(), politicians.end()},
                       {counties.begin(), counties.end()}, {months.begin(), months.end()});
  DonationsPanelReport local;
  for (const auto& rec : records) {
    ++local.records_read;
    if (rec.amount <= 0)
      throw ValidationError("non-positive donation amount for donor '" + rec.donor_id + "'");
    if (rec.amount >= options.cap) {  // strictly-below cap: equality is excluded
      ++local.excluded_at_or_above_cap;
      continue;
    }
    auto p = std::lower_bound(panel.politicians_.begin(), panel.politicians_.end(),
                              rec.politician_id);
    if (p == panel.politicians_.end() || *p != rec.politician_id) {
      ++local.unknown_politician;
      continue;
    }
    auto c = std::lower_bound(panel.counties_.begin(), panel.counties_.end(), rec.fips);
    if (c == panel.counties_.end() || *c != rec.fips) {
      ++local.unknown_county;
      continue;
    }
    YearMonth ym = year_month(rec.date);
    auto m = std::lower_bound(panel.months_.begin(), panel.months_.end(), ym);
    if (m == panel.months_.end() || *m != ym) {
      ++local.out_of_month_range;
      continue;
    }
    auto& accum = panel.sparse_[{int32_t(p - panel.politicians_.begin()),
                                 int32_t(c - panel.counties_.begin()),
                                 int32_t(m - panel.months_.begin())}];
    accum.revenue += rec.amount;
    accum.donors.push_back(rec.donor_id);
  }
  for (auto& [key, accum] : panel.sparse_) {
    std::sort(accum.donors.begin(), accum.donors.end());
    accum.donors.erase(std::unique(accum.donors.begin(), accum.donors.end()),
                       accum.donors.end());
  }
  if (report) *report = local;
  return panel;
}

int election_cycle(const Date& d) { return d.year + (d.year % 2); }

DonorSplit donor_split(std::span<const DonationRecord> records,
                       const std::map<std::string, double>& donor_ideology) {
  // Distinct donors per cycle first, then each cycle's median extremity.
  std::map<int, std::set<std::string>> cycle_donors;
  DonorSplit split;
  for (const auto& rec : records) {
    if (!donor_ideology.count(rec.donor_id)) continue;
    cycle_donors[election_cycle(rec.date)].insert(rec.donor_id);
  }
  for (const auto& [cycle, donors] : cycle_donors) {
    std::vector<double> extremity;
    extremity.reserve(donors.size());
    for (const auto& id : donors) extremity.push_back(std::abs(donor_ideology.at(id)));
    std::sort(extremity.begin(), extremity.end());
    size_t n = extremity.size();
    double median = n % 2 == 1 ? extremity[n / 2]
                               : 0.5 * (extremity[n / 2 - 1] + extremity[n / 2]);
    split.cycle_median[cycle] = median;
  }
  for (const auto& rec : records) {
    auto it = donor_ideology.find(rec.donor_id);
    if (it == donor_ideology.end()) {
      ++split.unknown_donor;
      continue;
    }
    double median = split.cycle_median.at(election_cycle(rec.date));
    // Exactly-at-the-median donors count as moderate.
    (std::abs(it->second) > median ? split.extreme : split.moderate).push_back(rec);
  }
  return split;
}

// ---------------------------------------------------------------------------

std::vector<ProtestCell> protest_panel(std::span<const ProtestEvent> events,
                                       std::span<const std::string> counties,
                                       const YearMonth& first, const YearMonth& last,
                                       size_t* unknown_county) {
  if (last < first) throw ConfigError("protest panel month range is inverted");
  std::vector<std::string> sorted(counties.begin(), counties.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  int n_months = months_between(first, last) + 1;
  std::map<std::pair<std::string, int>, int64_t> counts;
  size_t unknown = 0;
  for (const auto& ev : events) {
    if (!std::binary_search(sorted.begin(), sorted.end(), ev.fips)) {
      ++unknown;
      continue;
    }
    int offset = months_between(first, year_month(ev.date));
    if (offset < 0 || offset >= n_months) continue;
    counts[{ev.fips, offset}] += 1;
  }
  if (unknown_county) *unknown_county = unknown;

  std::vector<ProtestCell> out;
  out.reserve(sorted.size() * size_t(n_months));
  for (const auto& fips : sorted) {
    for (int m = 0; m < n_months; ++m) {
      ProtestCell cell;
      cell.fips = fips;
      cell.month = add_months(first, m);
      auto it = counts.find({fips, m});
      if (it != counts.end()) {
        cell.any = 1.0;
        cell.log_count = std::log1p(double(it->second));
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<AttitudeCell> attitudes_panel(std::span<const SurveyRow> survey,
                                          std::span<const corpus::Tweet> tweets,
                                          std::span<const rhetoric::Style> styles,
                                          std::span<const corpus::Politician> roster,
                                          bool standardize_outcomes) {
  check_aligned(tweets.size(), styles.size(), "attitudes_panel");
  if (survey.empty()) throw ValidationError("attitudes_panel: no survey rows");

  std::unordered_map<std::string, std::string> state_of;
  for (const auto& p : roster) state_of[p.id] = p.state;

  struct TweetAcc {
    int64_t n = 0, blame = 0, merit = 0;
  };
  std::map<std::pair<std::string, IsoWeek>, TweetAcc> tweet_acc;
  for (size_t i = 0; i < tweets.size(); ++i) {
    auto it = state_of.find(tweets[i].politician_id);
    if (it == state_of.end())
      throw ValidationError("tweet from politician '" + tweets[i].politician_id +
                            "' missing from roster");
    TweetAcc& a = tweet_acc[{it->second, iso_week(tweets[i].date())}];
    a.n += 1;
    if (styles[i] == rhetoric::Style::Blame) a.blame += 1;
    if (styles[i] == rhetoric::Style::Merit) a.merit += 1;
  }

  struct SurveyAcc {
    int64_t n = 0;
    double approval = 0, trust = 0, econ = 0;
  };
  std::map<std::pair<std::string, IsoWeek>, SurveyAcc> survey_acc;
  for (const auto& row : survey) {
    SurveyAcc& a = survey_acc[{row.state, row.week}];
    a.n += 1;
    a.approval += row.approval;
    a.trust += row.trust;
    a.econ += row.econ;
  }

  std::vector<AttitudeCell> out;
  out.reserve(survey_acc.size());
  for (const auto& [key, a] : survey_acc) {
    AttitudeCell cell;
    cell.state = key.first;
    cell.week = key.second;
    cell.n_respondents = a.n;
    cell.approval = a.approval / double(a.n);
    cell.trust = a.trust / double(a.n);
    cell.econ = a.econ / double(a.n);
    auto it = tweet_acc.find(key);
    if (it != tweet_acc.end()) {
      cell.n_tweets = it->second.n;
      cell.blame_share = double(it->second.blame) / double(it->second.n);
      cell.merit_share = double(it->second.merit) / double(it->second.n);
    }
    out.push_back(std::move(cell));
  }

  if (standardize_outcomes && out.size() >= 2) {
    auto standardize_field = [&](double AttitudeCell::* field) {
      std::vector<double> v(out.size());
      for (size_t i = 0; i < out.size(); ++i) v[i] = out[i].*field;
      std::vector<double> z = standardize(v);
      for (size_t i = 0; i < out.size(); ++i) out[i].*field = z[i];
    };
    standardize_field(&AttitudeCell::approval);
    standardize_field(&AttitudeCell::trust);
    standardize_field(&AttitudeCell::econ);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<BillDayCell> bills_exposure(std::span<const Bill> bills,
                                        std::span<const corpus::Presidency> presidencies,
                                        const Date& first, const Date& last) {
  if (last < first) throw ConfigError("bills_exposure date range is inverted");
  int64_t d0 = days_from_civil(first), d1 = days_from_civil(last);
  std::vector<BillDayCell> out;
  out.reserve(size_t(d1 - d0 + 1));
  std::map<int64_t, std::pair<bool, bool>> by_day;
  for (const auto& b : bills) {
    if (!b.roll_call) continue;  // eligibility: the bill reached a roll-call vote
    if (b.sponsor_party != "D" && b.sponsor_party != "R") continue;
    auto& flags = by_day[days_from_civil(b.date)];
    (b.sponsor_party == "D" ? flags.first : flags.second) = true;
  }
  for (int64_t d = d0; d <= d1; ++d) {
    BillDayCell cell;
    cell.date = civil_from_days(d);
    auto it = by_day.find(d);
    if (it != by_day.end()) {
      cell.dem_bill = it->second.first ? 1.0 : 0.0;
      cell.rep_bill = it->second.second ? 1.0 : 0.0;
    }
    cell.presidency = corpus::assign_presidency(cell.date, presidencies);
    out.push_back(std::move(cell));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> standardize(std::span<const double> values) {
  size_t n = values.size();
  if (n < 2) throw EstimationError("standardize needs at least two values");
  double mean = 0;
  for (double v : values) mean += v;
  mean /= double(n);
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / double(n - 1));
  if (sd == 0.0) throw EstimationError("standardize: zero variance");
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

std::vector<int> decile_ranks(std::span<const double> values) {
  size_t n = values.size();
  if (n == 0) throw ValidationError("decile_ranks: empty input");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
  // Minimum rank within ties, 1-based.
  std::vector<int64_t> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = int64_t(i) + 1;
    i = j + 1;
  }
  std::vector<int> out(n);
  for (size_t k = 0; k < n; ++k)
    out[k] = int((10 * rank[k] + int64_t(n) - 1) / int64_t(n));  // ceil(10 r / n)
  return out;
}

std::vector<double> decile_indicator(std::span<const double> values, int decile) {
  if (decile < 1 || decile > 10) throw ConfigError("decile must lie in 1..10");
  std::vector<int> ranks = decile_ranks(values);
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = ranks[i] == decile ? 1.0 : 0.0;
  return out;
}

}  // namespace polrhet::panelize
