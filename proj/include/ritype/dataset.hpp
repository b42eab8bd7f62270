#pragma once

#include <array>
#include <string>
#include <vector>

#include "ritype/csv.hpp"
#include "ritype/linalg.hpp"

namespace ritype {

enum class EsfriArea : int {
  Energy = 1,
  Environment = 2,
  HealthFood = 3,
  PSE = 4,
  SocialCultural = 5,
  ERI = 6,
};

struct InstitutionRecord {
  std::string id;
  std::string name;
  EsfriArea esfri_area = EsfriArea::Energy;
  bool pan_european = false;
  bool in_operation = false;
  bool resource_ri = false;
  bool facility_ri = false;
  bool distributed_ri = false;
  bool e_ri = false;
};

// The 19 rated indicators, numbered 1..6 and 8..20.
struct IndicatorRegistry {
  struct Entry {
    int number = 0;
    std::string label;
  };
  std::vector<Entry> entries;

  std::vector<std::string> column_names() const;  // "ind_<number>"
  static IndicatorRegistry parse(const std::string& json_text);
  std::string to_json() const;
};

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_labels;
  Mat values;  // row_ids.size() x col_labels.size()

  std::size_t n_rows() const { return row_ids.size(); }
  std::size_t n_cols() const { return col_labels.size(); }
};

// The seven admissible rating levels.
inline constexpr std::array<double, 7> kRatingLevels{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};

// Per-indicator counts over the seven rating levels; all indicators must
// share the same total.
struct RatingCountTable {
  std::vector<int> indicator_numbers;
  std::vector<std::array<long long, 7>> counts;

  long long total() const;  // throws InputError on mismatched row totals
};

std::vector<InstitutionRecord> load_institutions(const csv::Table& t);
std::vector<InstitutionRecord> load_institutions_file(const std::string& path);
csv::Table institutions_to_csv(const std::vector<InstitutionRecord>& records);

// n x 12 binary encoding: six one-hot area dummies then the six flags.
FeatureMatrix encode_attributes(const std::vector<InstitutionRecord>& records);

// Rating matrix keyed by institution id, columns in registry order. Missing
// cells are rejected unless mean_impute is set, in which case they receive
// the column mean snapped to the nearest half point; every imputation is
// described in *notes when provided.
FeatureMatrix load_ratings(const csv::Table& t, const IndicatorRegistry& registry,
                           bool mean_impute = false, std::vector<std::string>* notes = nullptr);
FeatureMatrix load_ratings_file(const std::string& path, const IndicatorRegistry& registry,
                                bool mean_impute = false, std::vector<std::string>* notes = nullptr);
csv::Table ratings_to_csv(const FeatureMatrix& ratings);

RatingCountTable load_counts(const csv::Table& t);
RatingCountTable load_counts_file(const std::string& path);
csv::Table counts_to_csv(const RatingCountTable& table);

// Expands counts to a column-sorted value matrix with synthetic row ids.
// Rows do not represent joint observations across indicators.
FeatureMatrix expand_counts(const RatingCountTable& table);

// Histogram of a rating matrix per indicator column.
RatingCountTable tabulate(const FeatureMatrix& ratings);

namespace bundled {

// Resources compiled into the library; byte-identical copies live in data/.
const char* institutions_csv();
const char* rating_counts_csv();
const char* indicator_registry_json();

const std::vector<InstitutionRecord>& institutions();
const RatingCountTable& rating_counts();
const IndicatorRegistry& indicators();

}  // namespace bundled

}  // namespace ritype
