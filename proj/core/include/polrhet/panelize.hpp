#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polrhet/corpus.hpp"
#include "polrhet/dates.hpp"
#include "polrhet/rhetoric.hpp"
#include "polrhet/table.hpp"

namespace polrhet::panelize {

// ---------------------------------------------------------------------------
// Descriptive shares.

struct ShareCell {
  double share = 0;
  double ci_lo = 0;  // 95% normal-approximation binomial interval
  double ci_hi = 0;
  int64_t n = 0;
};

struct YearShares {
  int year = 0;
  ShareCell blame;
  ShareCell merit;
};

// Per-year shares of blame/merit tweets (styles aligned with tweets).
std::vector<YearShares> yearly_shares(std::span<const corpus::Tweet> tweets,
                                      std::span<const rhetoric::Style> styles);

// Blame share among negative-sentiment tweets and merit share among
// positive-sentiment tweets, per presidency.  Presidencies with an empty
// denominator are listed in `omitted` rather than reported as zero.
struct CrowdingCell {
  std::string presidency;
  ShareCell blame_in_negative;
  ShareCell merit_in_positive;
};

struct CrowdingReport {
  std::vector<CrowdingCell> cells;       // presidency order of the input table
  std::vector<std::string> omitted;      // presidency + which denominator was empty
};

CrowdingReport crowding_shares(std::span<const corpus::Tweet> tweets,
                               std::span<const rhetoric::Style> styles,
                               std::span<const double> sentiment,
                               std::span<const corpus::Presidency> presidencies,
                               double neutral_band = 0.0);

// Mean outcome gap between politicians of the ruling party and the
// opposition, per presidency.
struct GapCell {
  std::string presidency;
  double ruling_mean = 0;
  double opposition_mean = 0;
  double gap = 0;  // ruling - opposition
  int64_t n_ruling = 0;
  int64_t n_opposition = 0;
};

struct GapReport {
  std::vector<GapCell> cells;
  std::vector<std::string> omitted;  // presidencies lacking one side entirely
};

GapReport polarization_gap(std::span<const corpus::Tweet> tweets,
                           std::span<const double> outcome,
                           const std::map<std::string, std::string>& politician_party,
                           std::span<const corpus::Presidency> presidencies);

// ---------------------------------------------------------------------------
// Politician-month aggregation: one cell per (politician, calendar month)
// with at least one tweet.

struct PoliticianMonthCell {
  std::string politician_id;
  YearMonth month;
  int64_t n = 0;
  double blame_share = 0;
  double merit_share = 0;
  double causal_share = 0;  // blame + merit
};

std::vector<PoliticianMonthCell> politician_month_shares(std::span<const corpus::Tweet> tweets,
                                                         std::span<const rhetoric::Style> styles);

// ---------------------------------------------------------------------------
// Donations panel: politician x county x month grid with log1p-transformed
// revenue, donor count, and average gift.  Cells with no donations exist
// logically (all zeros) but are stored sparsely; iteration visits the full
// grid in a fixed (politician, county, month) order.

struct DonationRecord {
  std::string donor_id;
  std::string politician_id;
  std::string fips;
  Date date;
  double amount = 0;
};

struct DonationsPanelOptions {
  double cap = 1000.0;  // strictly-below cap on individual gifts
};

struct DonationsPanelReport {
  size_t records_read = 0;
  size_t excluded_at_or_above_cap = 0;
  size_t unknown_politician = 0;
  size_t unknown_county = 0;
  size_t out_of_month_range = 0;
};

class DonationsPanel {
 public:
  struct Cell {
    const std::string* politician;
    const std::string* county;
    YearMonth month;
    double log_revenue;  // log1p(total gifts below cap)
    double log_donors;   // log1p(distinct donors)
    double log_avg;      // log1p(revenue / donors), 0 for empty cells
    bool any;
  };

  DonationsPanel(std::vector<std::string> politicians, std::vector<std::string> counties,
                 std::vector<YearMonth> months);

  size_t n_cells() const {
    return politicians_.size() * counties_.size() * months_.size();
  }
  size_t n_nonzero() const { return sparse_.size(); }

  // Visits every grid cell in (politician, county, month) order.
  void for_each(const std::function<void(const Cell&)>& fn) const;

  // Full-grid table with categorical politician/county/month columns and the
  // numeric outcomes; column "any" marks cells with at least one gift.
  DataTable to_table() const;

 private:
  friend DonationsPanel donations_panel(std::span<const DonationRecord>,
                                        std::span<const std::string>,
                                        std::span<const std::string>,
                                        std::span<const YearMonth>,
                                        const DonationsPanelOptions&, DonationsPanelReport*);
  struct Accum {
    double revenue = 0;
    std::vector<std::string> donors;  // deduplicated lazily
  };
  std::vector<std::string> politicians_;  // sorted
  std::vector<std::string> counties_;     // sorted
  std::vector<YearMonth> months_;         // sorted
  std::map<std::tuple<int32_t, int32_t, int32_t>, Accum> sparse_;
};

DonationsPanel donations_panel(std::span<const DonationRecord> records,
                               std::span<const std::string> politicians,
                               std::span<const std::string> counties,
                               std::span<const YearMonth> months,
                               const DonationsPanelOptions& options = {},
                               DonationsPanelReport* report = nullptr);

// Splits donation records by donor extremity: within each two-year cycle,
// donors whose |ideology| exceeds that cycle's median are extreme; donors at
// or below the median (including exactly at it) are moderate.  Records from
// donors without an ideology score are dropped and counted.
struct DonorSplit {
  std::vector<DonationRecord> moderate;
  std::vector<DonationRecord> extreme;
  std::map<int, double> cycle_median;  // cycle (even year) -> median |ideology|
  size_t unknown_donor = 0;
};

DonorSplit donor_split(std::span<const DonationRecord> records,
                       const std::map<std::string, double>& donor_ideology);

int election_cycle(const Date& d);  // the even year closing the two-year cycle

// ---------------------------------------------------------------------------
// County-month protest panel over an explicit month range.

struct ProtestEvent {
  std::string fips;
  Date date;
};

struct ProtestCell {
  std::string fips;
  YearMonth month;
  double any = 0;
  double log_count = 0;  // log1p(events)
};

std::vector<ProtestCell> protest_panel(std::span<const ProtestEvent> events,
                                       std::span<const std::string> counties,
                                       const YearMonth& first, const YearMonth& last,
                                       size_t* unknown_county = nullptr);

// ---------------------------------------------------------------------------
// State-week attitudes panel: survey responses averaged per (state, ISO
// week), joined with the blame/merit shares of that state's politicians in
// the same week.  Outcome columns are standardized across cells.

struct SurveyRow {
  std::string state;
  IsoWeek week;
  double approval = 0;  // head-of-government approval
  double trust = 0;     // trust in institutions
  double econ = 0;      // economic assessment
};

struct AttitudeCell {
  std::string state;
  IsoWeek week;
  int64_t n_respondents = 0;
  int64_t n_tweets = 0;
  double blame_share = 0;
  double merit_share = 0;
  double approval = 0;
  double trust = 0;
  double econ = 0;
};

std::vector<AttitudeCell> attitudes_panel(std::span<const SurveyRow> survey,
                                          std::span<const corpus::Tweet> tweets,
                                          std::span<const rhetoric::Style> styles,
                                          std::span<const corpus::Politician> roster,
                                          bool standardize_outcomes = true);

// ---------------------------------------------------------------------------
// Daily legislative-agenda exposure: for each day in [first, last], whether
// each party sponsored an eligible bill (came to a roll-call vote) that day,
// plus the sitting presidency.

struct Bill {
  std::string id;
  Date date;
  std::string sponsor_party;  // "D" / "R"
  bool roll_call = false;
};

struct BillDayCell {
  Date date;
  double dem_bill = 0;
  double rep_bill = 0;
  std::string presidency;
};

std::vector<BillDayCell> bills_exposure(std::span<const Bill> bills,
                                        std::span<const corpus::Presidency> presidencies,
                                        const Date& first, const Date& last);

// ---------------------------------------------------------------------------
// Column utilities.

// (x - mean) / sd with the n-1 denominator; zero variance is an error.
std::vector<double> standardize(std::span<const double> values);

// Decile of each element: ceil(10 * min-rank / n), so ties share the lower
// decile and the largest element always lands in decile 10.
std::vector<int> decile_ranks(std::span<const double> values);

// 0/1 indicator for membership in the given decile (1..10).
std::vector<double> decile_indicator(std::span<const double> values, int decile);

}  // namespace polrhet::panelize
