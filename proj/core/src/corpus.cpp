#include "polrhet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "polrhet/errors.hpp"
#include "polrhet/io.hpp"

namespace polrhet::corpus {

std::vector<Presidency> default_presidencies() {
  return {
      {"obama", "D", Date{2009, 1, 20}, Date{2017, 1, 19}},
      {"trump", "R", Date{2017, 1, 20}, Date{2021, 1, 19}},
      {"biden", "D", Date{2021, 1, 20}, Date{2025, 1, 19}},
  };
}

const Presidency* find_presidency(const Date& d, std::span<const Presidency> table) {
  for (const auto& p : table)
    if (!(d < p.start) && !(p.end < d)) return &p;
  return nullptr;
}

const std::string& assign_presidency(const Date& d, std::span<const Presidency> table) {
  const Presidency* p = find_presidency(d, table);
  if (!p) throw ValidationError("date " + format_date(d) + " outside every presidency");
  return p->name;
}

std::vector<Document> segment_sentences(const Document& doc) {
  std::vector<Document> out;
  const std::string& text = doc.body;
  size_t start = 0;
  size_t i = 0;
  auto flush = [&](size_t end) {
    size_t a = start, b = end;
    while (a < b && std::isspace((unsigned char)text[a])) ++a;
    while (b > a && std::isspace((unsigned char)text[b - 1])) --b;
    if (b > a) {
      Document sent = doc;
      sent.id = doc.id + "#s" + std::to_string(out.size() + 1);
      sent.body = text.substr(a, b - a);
      sent.unit = DocUnit::NewsletterSentence;
      out.push_back(std::move(sent));
    }
    start = end;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      size_t j = i + 1;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      if (j >= text.size() || std::isspace((unsigned char)text[j])) {
        flush(j);
        i = j;
        continue;
      }
      i = j;
      continue;
    }
    ++i;
  }
  flush(text.size());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool truthy(const std::string& cell) {
  return cell == "1" || cell == "true" || cell == "True" || cell == "TRUE";
}

}  // namespace

std::vector<Tweet> ingest_tweets(const std::filesystem::path& path, const TweetSchema& schema,
                                 IngestReport* report) {
  if (schema.politician.empty() == schema.account.empty())
    throw ConfigError("tweet schema must name exactly one of politician/account");

  TableFile file = read_table_file(path);
  size_t id_col = file.column(schema.id);
  size_t who_col = file.column(schema.politician.empty() ? schema.account : schema.politician);
  size_t ts_col = file.column(schema.timestamp);
  size_t text_col = file.column(schema.text);
  size_t rt_count_col = schema.retweet_count.empty() ? TableFile::npos
                                                     : file.column(schema.retweet_count);
  size_t is_rt_col = schema.is_retweet.empty() ? TableFile::npos : file.column(schema.is_retweet);
  size_t is_quote_col = schema.is_quote.empty() ? TableFile::npos : file.column(schema.is_quote);

  std::vector<Tweet> tweets;
  tweets.reserve(file.rows.size());
  IngestReport local;
  std::unordered_set<std::string> seen;
  std::vector<std::string> duplicates;

  for (const auto& row : file.rows) {
    ++local.rows_read;
    if (is_rt_col != TableFile::npos && truthy(row[is_rt_col])) {
      ++local.retweets_dropped;
      continue;
    }
    Tweet t;
    t.id = row[id_col];
    t.text = row[text_col];
    if (t.id.empty() || t.text.empty()) {
      ++local.malformed_dropped;
      continue;
    }
    try {
      t.timestamp = parse_timestamp(row[ts_col]);
      if (rt_count_col != TableFile::npos && !row[rt_count_col].empty())
        t.retweet_count = parse_int(row[rt_count_col], schema.retweet_count);
    } catch (const SchemaError&) {
      ++local.malformed_dropped;
      continue;
    }
    if (!schema.account.empty()) {
      auto it = schema.account_to_politician.find(row[who_col]);
      if (it == schema.account_to_politician.end()) {
        ++local.unmatched_dropped;
        continue;
      }
      t.politician_id = it->second;
    } else {
      t.politician_id = row[who_col];
      if (t.politician_id.empty()) {
        ++local.malformed_dropped;
        continue;
      }
    }
    t.is_quote = is_quote_col != TableFile::npos && truthy(row[is_quote_col]);
    if (!seen.insert(t.id).second) {
      if (duplicates.size() < 10) duplicates.push_back(t.id);
      continue;
    }
    tweets.push_back(std::move(t));
  }
  if (!duplicates.empty()) {
    std::string msg = "duplicate tweet ids:";
    for (const auto& id : duplicates) msg += " " + id;
    throw ValidationError(msg);
  }
  if (report) *report = local;
  return tweets;
}

void write_tweets(const std::filesystem::path& path, std::span<const Tweet> tweets,
                  const std::map<std::string, std::string>& provenance) {
  TableFile file;
  file.schema = {{"id", "string"},           {"politician", "string"}, {"timestamp", "timestamp"},
                 {"text", "string"},         {"retweet_count", "int"}, {"is_retweet", "bool"},
                 {"is_quote", "bool"}};
  file.provenance = provenance;
  file.rows.reserve(tweets.size());
  for (const auto& t : tweets) {
    file.rows.push_back({t.id, t.politician_id, format_timestamp(t.timestamp), t.text,
                         t.retweet_count ? std::to_string(*t.retweet_count) : "",
                         "0", t.is_quote ? "1" : "0"});
  }
  write_table_file(path, file);
}

std::vector<Politician> read_politicians(const std::filesystem::path& path) {
  TableFile file = read_table_file(path);
  size_t id = file.column("id"), party = file.column("party"), state = file.column("state");
  size_t chamber = file.column("chamber"), female = file.column("female");
  size_t birth = file.column("birth_year"), ideo = file.column("ideology");
  std::vector<Politician> out;
  out.reserve(file.rows.size());
  std::unordered_set<std::string> seen;
  for (const auto& row : file.rows) {
    Politician p;
    p.id = row[id];
    p.party = row[party];
    p.state = row[state];
    p.chamber = row[chamber];
    p.female = parse_bool(row[female], "female");
    p.birth_year = int(parse_int(row[birth], "birth_year"));
    p.ideology = parse_real(row[ideo], "ideology");
    if (p.id.empty() || !seen.insert(p.id).second)
      throw ValidationError("empty or duplicate politician id '" + p.id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

void write_politicians(const std::filesystem::path& path, std::span<const Politician> roster,
                       const std::map<std::string, std::string>& provenance) {
  TableFile file;
  file.schema = {{"id", "string"},     {"party", "string"},   {"state", "string"},
                 {"chamber", "string"}, {"female", "bool"},    {"birth_year", "int"},
                 {"ideology", "real"}};
  file.provenance = provenance;
  for (const auto& p : roster)
    file.rows.push_back({p.id, p.party, p.state, p.chamber, p.female ? "1" : "0",
                         std::to_string(p.birth_year), format_real(p.ideology)});
  write_table_file(path, file);
}

std::vector<CountyAttributes> read_counties(const std::filesystem::path& path) {
  TableFile file = read_table_file(path);
  size_t fips = file.column("fips"), users = file.column("users");
  size_t early = file.column("early_adopt"), placebo = file.column("placebo_adopt");
  std::vector<CountyAttributes> out;
  out.reserve(file.rows.size());
  std::unordered_set<std::string> seen;
  for (const auto& row : file.rows) {
    CountyAttributes c;
    c.fips = row[fips];
    c.users = parse_real(row[users], "users");
    c.early_adopt = parse_real(row[early], "early_adopt");
    c.placebo_adopt = parse_real(row[placebo], "placebo_adopt");
    for (size_t j = 0; j < file.schema.size(); ++j) {
      if (j == fips || j == users || j == early || j == placebo) continue;
      c.controls.emplace_back(file.schema[j].name, parse_real(row[j], file.schema[j].name));
    }
    if (c.fips.empty() || !seen.insert(c.fips).second)
      throw ValidationError("empty or duplicate county code '" + c.fips + "'");
    out.push_back(std::move(c));
  }
  return out;
}

void write_counties(const std::filesystem::path& path, std::span<const CountyAttributes> counties,
                    const std::map<std::string, std::string>& provenance) {
  TableFile file;
  file.schema = {{"fips", "string"},
                 {"users", "real"},
                 {"early_adopt", "real"},
                 {"placebo_adopt", "real"}};
  if (!counties.empty())
    for (const auto& [name, value] : counties.front().controls)
      file.schema.push_back({name, "real"});
  file.provenance = provenance;
  for (const auto& c : counties) {
    std::vector<std::string> row = {c.fips, format_real(c.users), format_real(c.early_adopt),
                                    format_real(c.placebo_adopt)};
    if (c.controls.size() + 4 != file.schema.size())
      throw ValidationError("county '" + c.fips + "' has inconsistent control count");
    for (const auto& [name, value] : c.controls) row.push_back(format_real(value));
    file.rows.push_back(std::move(row));
  }
  write_table_file(path, file);
}

}  // namespace polrhet::corpus
