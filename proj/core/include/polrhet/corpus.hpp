#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polrhet/dates.hpp"

namespace polrhet::corpus {

struct Tweet {
  std::string id;
  std::string politician_id;
  int64_t timestamp = 0;  // UTC seconds
  std::string text;
  std::optional<int64_t> retweet_count;
  bool is_quote = false;

  Date date() const { return date_of_timestamp(timestamp); }
};

struct Politician {
  std::string id;
  std::string party;    // "D", "R", ...
  std::string state;    // postal code
  std::string chamber;  // "house" / "senate"
  bool female = false;
  int birth_year = 0;
  double ideology = 0;  // signed score, negative = left
};

struct Presidency {
  std::string name;
  std::string party;
  Date start;  // inclusive; inaugurations fall on Jan 20
  Date end;    // inclusive
};

// Inauguration day belongs to the incoming administration.
std::vector<Presidency> default_presidencies();
const Presidency* find_presidency(const Date& d, std::span<const Presidency> table);
// Throws ValidationError when the date precedes or follows every entry.
const std::string& assign_presidency(const Date& d, std::span<const Presidency> table);

enum class DocUnit { Tweet, NewsletterSentence };

struct Document {
  std::string id;
  std::string politician_id;
  Date date;
  std::string body;
  DocUnit unit = DocUnit::Tweet;
};

// Splits on sentence-final runs of '.', '!', '?' followed by whitespace or
// end of text, keeping the delimiter with its sentence.  Child ids are
// "<id>#s<k>" with k starting at 1; whitespace-only fragments are dropped.
std::vector<Document> segment_sentences(const Document& doc);

struct CountyAttributes {
  std::string fips;
  double users = 0;       // platform adoption level
  double early_adopt = 0; // festival-cohort instrument component (treatment year)
  double placebo_adopt = 0;  // same component, placebo year
  std::vector<std::pair<std::string, double>> controls;
};

// ---------------------------------------------------------------------------
// Ingestion.

// Maps logical tweet fields onto the columns of a source table.  The source
// must carry a #schema header.  `account` names a column of raw account ids
// translated through account_to_politician; alternatively `politician` names
// a column that already holds politician ids.
struct TweetSchema {
  std::string id = "id";
  std::string politician;            // exactly one of politician/account non-empty
  std::string account;
  std::string timestamp = "timestamp";
  std::string text = "text";
  std::string retweet_count;         // optional
  std::string is_retweet;            // optional; truthy rows are dropped
  std::string is_quote;              // optional
  std::map<std::string, std::string> account_to_politician;
};

struct IngestReport {
  size_t rows_read = 0;
  size_t malformed_dropped = 0;   // unparseable timestamp/count, empty id or text
  size_t retweets_dropped = 0;    // pure retweet records
  size_t unmatched_dropped = 0;   // account missing from the account map
};

// Reads tweets in file order.  Duplicate ids abort with a ValidationError
// naming up to the first ten offenders.
std::vector<Tweet> ingest_tweets(const std::filesystem::path& path, const TweetSchema& schema,
                                 IngestReport* report = nullptr);

void write_tweets(const std::filesystem::path& path, std::span<const Tweet> tweets,
                  const std::map<std::string, std::string>& provenance = {});

std::vector<Politician> read_politicians(const std::filesystem::path& path);
void write_politicians(const std::filesystem::path& path, std::span<const Politician> roster,
                       const std::map<std::string, std::string>& provenance = {});

std::vector<CountyAttributes> read_counties(const std::filesystem::path& path);
void write_counties(const std::filesystem::path& path, std::span<const CountyAttributes> counties,
                    const std::map<std::string, std::string>& provenance = {});

}  // namespace polrhet::corpus
