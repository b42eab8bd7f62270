#include "ritype/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ritype/common.hpp"

namespace ritype {

namespace {

const std::vector<std::string> kInstitutionHeader = {
    "id",          "name",        "esfri_area",  "pan_european", "in_operation",
    "resource_ri", "facility_ri", "distributed_ri", "e_ri"};

const std::vector<std::string> kAttributeLabels = {
    "area_energy",  "area_environment", "area_health_food", "area_pse",
    "area_social_cultural", "area_eri", "pan_european",     "in_operation",
    "resource_ri",  "facility_ri",      "distributed_ri",   "e_ri"};

const std::vector<std::string> kCountsHeader = {"indicator", "n_1", "n_1_5", "n_2", "n_2_5",
                                                "n_3",       "n_3_5", "n_4"};

std::string cell_msg(std::size_t line, const std::string& column, const std::string& what) {
  return "line " + std::to_string(line) + ", column " + column + ": " + what;
}

long long parse_int(const std::string& s, std::size_t line, const std::string& column) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(cell_msg(line, column, "not an integer: '" + s + "'"));
  return value;
}

double parse_double(const std::string& s, std::size_t line, const std::string& column) {
  if (s.empty()) throw InputError(cell_msg(line, column, "empty value"));
  const char* begin = s.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end != begin + s.size() || !std::isfinite(value))
    throw InputError(cell_msg(line, column, "not a number: '" + s + "'"));
  return value;
}

bool parse_flag(const std::string& s, std::size_t line, const std::string& column) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw InputError(cell_msg(line, column, "flag must be 0 or 1, got '" + s + "'"));
}

void require_header(const csv::Table& t, const std::vector<std::string>& expected,
                    const std::string& what) {
  if (t.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ',';
      want += expected[i];
    }
    throw InputError(what + " header must be " + want);
  }
}

std::string format_rating(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

int rating_level_index(double v) {
  for (std::size_t l = 0; l < kRatingLevels.size(); ++l)
    if (std::fabs(v - kRatingLevels[l]) < 1e-9) return static_cast<int>(l);
  return -1;
}

}  // namespace

std::vector<std::string> IndicatorRegistry::column_names() const {
  std::vector<std::string> names;
  names.reserve(entries.size());
  for (const auto& e : entries) names.push_back("ind_" + std::to_string(e.number));
  return names;
}

IndicatorRegistry IndicatorRegistry::parse(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("indicator registry: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("indicators") || !j["indicators"].is_array())
    throw InputError("indicator registry: expected an object with an 'indicators' array");

  IndicatorRegistry reg;
  std::set<int> seen;
  for (const auto& item : j["indicators"]) {
    if (!item.is_object() || !item.contains("number") || !item.contains("label") ||
        !item["number"].is_number_integer() || !item["label"].is_string())
      throw InputError("indicator registry: each entry needs integer 'number' and string 'label'");
    Entry e{item["number"].get<int>(), item["label"].get<std::string>()};
    if (e.number < 1 || e.number > 20 || e.number == 7)
      throw InputError("indicator registry: invalid indicator number " + std::to_string(e.number));
    if (!seen.insert(e.number).second)
      throw InputError("indicator registry: duplicate indicator number " +
                       std::to_string(e.number));
    reg.entries.push_back(std::move(e));
  }
  if (reg.entries.size() != 19)
    throw InputError("indicator registry: expected 19 entries, got " +
                     std::to_string(reg.entries.size()));
  for (std::size_t i = 1; i < reg.entries.size(); ++i)
    if (reg.entries[i].number <= reg.entries[i - 1].number)
      throw InputError("indicator registry: entries must be in ascending number order");
  return reg;
}

std::string IndicatorRegistry::to_json() const {
  nlohmann::ordered_json j;
  j["indicators"] = nlohmann::ordered_json::array();
  for (const auto& e : entries)
    j["indicators"].push_back(nlohmann::ordered_json{{"number", e.number}, {"label", e.label}});
  return j.dump(2) + "\n";
}

long long RatingCountTable::total() const {
  if (counts.empty()) throw InputError("rating count table is empty");
  long long n = -1;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    long long row_total = 0;
    for (long long c : counts[r]) row_total += c;
    if (n < 0) n = row_total;
    if (row_total != n)
      throw InputError("indicator " + std::to_string(indicator_numbers[r]) + " total " +
                       std::to_string(row_total) + " differs from " + std::to_string(n));
  }
  return n;
}

std::vector<InstitutionRecord> load_institutions(const csv::Table& t) {
  require_header(t, kInstitutionHeader, "attribute CSV");
  std::vector<InstitutionRecord> records;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::size_t line = t.line(r);
    InstitutionRecord rec;
    rec.id = row[0];
    if (rec.id.empty()) throw InputError(cell_msg(line, "id", "empty id"));
    if (!ids.insert(rec.id).second) throw InputError("duplicate id: " + rec.id);
    rec.name = row[1];
    long long area = parse_int(row[2], line, "esfri_area");
    if (area < 1 || area > 6)
      throw InputError(cell_msg(line, "esfri_area", "must be in 1..6, got " + row[2]));
    rec.esfri_area = static_cast<EsfriArea>(area);
    rec.pan_european = parse_flag(row[3], line, "pan_european");
    rec.in_operation = parse_flag(row[4], line, "in_operation");
    rec.resource_ri = parse_flag(row[5], line, "resource_ri");
    rec.facility_ri = parse_flag(row[6], line, "facility_ri");
    rec.distributed_ri = parse_flag(row[7], line, "distributed_ri");
    rec.e_ri = parse_flag(row[8], line, "e_ri");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<InstitutionRecord> load_institutions_file(const std::string& path) {
  return load_institutions(csv::read_file(path));
}

csv::Table institutions_to_csv(const std::vector<InstitutionRecord>& records) {
  csv::Table t;
  t.header = kInstitutionHeader;
  for (const auto& r : records) {
    t.rows.push_back({r.id, r.name, std::to_string(static_cast<int>(r.esfri_area)),
                      r.pan_european ? "1" : "0", r.in_operation ? "1" : "0",
                      r.resource_ri ? "1" : "0", r.facility_ri ? "1" : "0",
                      r.distributed_ri ? "1" : "0", r.e_ri ? "1" : "0"});
  }
  return t;
}

FeatureMatrix encode_attributes(const std::vector<InstitutionRecord>& records) {
  if (records.empty()) throw InputError("no institution records to encode");
  FeatureMatrix m;
  m.col_labels = kAttributeLabels;
  m.values = Mat(records.size(), kAttributeLabels.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    m.row_ids.push_back(r.id);
    m.values(i, static_cast<std::size_t>(static_cast<int>(r.esfri_area) - 1)) = 1.0;
    m.values(i, 6) = r.pan_european ? 1.0 : 0.0;
    m.values(i, 7) = r.in_operation ? 1.0 : 0.0;
    m.values(i, 8) = r.resource_ri ? 1.0 : 0.0;
    m.values(i, 9) = r.facility_ri ? 1.0 : 0.0;
    m.values(i, 10) = r.distributed_ri ? 1.0 : 0.0;
    m.values(i, 11) = r.e_ri ? 1.0 : 0.0;
  }
  return m;
}

FeatureMatrix load_ratings(const csv::Table& t, const IndicatorRegistry& registry,
                           bool mean_impute, std::vector<std::string>* notes) {
  if (t.header.empty() || t.header[0] != "id")
    throw InputError("rating CSV header must start with id");
  std::vector<std::string> expected_cols = registry.column_names();

  // Map each file column to its registry position; any order accepted.
  std::unordered_map<std::string, std::size_t> registry_pos;
  for (std::size_t i = 0; i < expected_cols.size(); ++i) registry_pos[expected_cols[i]] = i;

  std::vector<std::size_t> col_to_registry(t.header.size() - 1);
  std::vector<bool> seen(expected_cols.size(), false);
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    auto it = registry_pos.find(t.header[c]);
    if (it == registry_pos.end())
      throw InputError("unknown indicator column: " + t.header[c]);
    if (seen[it->second]) throw InputError("duplicate indicator column: " + t.header[c]);
    seen[it->second] = true;
    col_to_registry[c - 1] = it->second;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw InputError("missing indicator column: " + expected_cols[i]);

  FeatureMatrix m;
  m.col_labels = expected_cols;
  m.values = Mat(t.rows.size(), expected_cols.size());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> missing(expected_cols.size());
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::size_t line = t.line(r);
    if (row[0].empty()) throw InputError(cell_msg(line, "id", "empty id"));
    if (!ids.insert(row[0]).second) throw InputError("duplicate id: " + row[0]);
    m.row_ids.push_back(row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      std::size_t j = col_to_registry[c - 1];
      const std::string& cell = row[c];
      if (cell.empty()) {
        if (!mean_impute)
          throw InputError(cell_msg(line, t.header[c], "missing rating"));
        missing[j].push_back({r, line});
        m.values(r, j) = std::nan("");
        continue;
      }
      double v = parse_double(cell, line, t.header[c]);
      if (v < 1.0 - 1e-9 || v > 4.0 + 1e-9)
        throw InputError(cell_msg(line, t.header[c], "rating outside the 1..4 scale: " + cell));
      if (rating_level_index(v) < 0)
        throw InputError(cell_msg(line, t.header[c], "rating not on half-point scale: " + cell));
      m.values(r, j) = v;
    }
  }

  for (std::size_t j = 0; j < expected_cols.size(); ++j) {
    if (missing[j].empty()) continue;
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
      double v = m.values(r, j);
      if (!std::isnan(v)) {
        sum += v;
        ++present;
      }
    }
    if (present == 0)
      throw InputError("column " + expected_cols[j] + " has no observed ratings to impute from");
    double mean = sum / static_cast<double>(present);
    double snapped = std::clamp(round_half_up(mean * 2.0, 0) / 2.0, 1.0, 4.0);
    for (auto [r, line] : missing[j]) m.values(r, j) = snapped;
    if (notes)
      notes->push_back("imputed " + std::to_string(missing[j].size()) + " missing cell(s) in " +
                       expected_cols[j] + " with " + format_rating(snapped));
  }
  return m;
}

FeatureMatrix load_ratings_file(const std::string& path, const IndicatorRegistry& registry,
                                bool mean_impute, std::vector<std::string>* notes) {
  return load_ratings(csv::read_file(path), registry, mean_impute, notes);
}

csv::Table ratings_to_csv(const FeatureMatrix& ratings) {
  csv::Table t;
  t.header.push_back("id");
  for (const auto& label : ratings.col_labels) t.header.push_back(label);
  for (std::size_t r = 0; r < ratings.n_rows(); ++r) {
    std::vector<std::string> row;
    row.push_back(ratings.row_ids[r]);
    for (std::size_t c = 0; c < ratings.n_cols(); ++c)
      row.push_back(format_rating(ratings.values(r, c)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

RatingCountTable load_counts(const csv::Table& t) {
  require_header(t, kCountsHeader, "rating count CSV");
  RatingCountTable table;
  std::set<long long> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::size_t line = t.line(r);
    long long number = parse_int(row[0], line, "indicator");
    if (number < 1 || number > 20 || number == 7)
      throw InputError(cell_msg(line, "indicator", "invalid indicator number " + row[0]));
    if (!seen.insert(number).second)
      throw InputError("duplicate indicator " + std::to_string(number));
    std::array<long long, 7> counts{};
    for (std::size_t c = 0; c < 7; ++c) {
      long long v = parse_int(row[c + 1], line, kCountsHeader[c + 1]);
      if (v < 0) throw InputError(cell_msg(line, kCountsHeader[c + 1], "negative count"));
      counts[c] = v;
    }
    table.indicator_numbers.push_back(static_cast<int>(number));
    table.counts.push_back(counts);
  }
  if (table.counts.empty()) throw InputError("rating count CSV has no rows");
  table.total();  // validates equal totals
  return table;
}

RatingCountTable load_counts_file(const std::string& path) {
  return load_counts(csv::read_file(path));
}

csv::Table counts_to_csv(const RatingCountTable& table) {
  csv::Table t;
  t.header = kCountsHeader;
  for (std::size_t r = 0; r < table.counts.size(); ++r) {
    std::vector<std::string> row;
    row.push_back(std::to_string(table.indicator_numbers[r]));
    for (long long c : table.counts[r]) row.push_back(std::to_string(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

FeatureMatrix expand_counts(const RatingCountTable& table) {
  long long n = table.total();
  if (n <= 0) throw InputError("rating count table has zero total");

  FeatureMatrix m;
  m.values = Mat(static_cast<std::size_t>(n), table.counts.size());
  int width = static_cast<int>(std::to_string(n).size());
  for (long long i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "R%0*lld", width, i + 1);
    m.row_ids.push_back(buf);
  }
  for (std::size_t j = 0; j < table.counts.size(); ++j) {
    m.col_labels.push_back("ind_" + std::to_string(table.indicator_numbers[j]));
    std::size_t r = 0;
    for (std::size_t l = 0; l < kRatingLevels.size(); ++l)
      for (long long c = 0; c < table.counts[j][l]; ++c) m.values(r++, j) = kRatingLevels[l];
  }
  return m;
}

RatingCountTable tabulate(const FeatureMatrix& ratings) {
  if (ratings.n_rows() == 0) throw InputError("rating matrix is empty");
  RatingCountTable table;
  for (std::size_t j = 0; j < ratings.n_cols(); ++j) {
    const std::string& label = ratings.col_labels[j];
    if (label.rfind("ind_", 0) != 0)
      throw InputError("rating column label must look like ind_<number>, got " + label);
    table.indicator_numbers.push_back(
        static_cast<int>(parse_int(label.substr(4), 0, "indicator")));
    std::array<long long, 7> counts{};
    for (std::size_t r = 0; r < ratings.n_rows(); ++r) {
      int l = rating_level_index(ratings.values(r, j));
      if (l < 0)
        throw InputError("value " + std::to_string(ratings.values(r, j)) + " in column " + label +
                         " is not a rating level");
      ++counts[static_cast<std::size_t>(l)];
    }
    table.counts.push_back(counts);
  }
  return table;
}

}  // namespace ritype
