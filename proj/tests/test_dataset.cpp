#include <doctest.h>

#include <numeric>
#include <string>
#include <vector>

#include "ritype/common.hpp"
#include "ritype/csv.hpp"
#include "ritype/dataset.hpp"

using namespace ritype;

namespace {

const IndicatorRegistry& registry() { return bundled::indicators(); }

std::string small_registry_json() {
  IndicatorRegistry r;
  r.entries = bundled::indicators().entries;
  return r.to_json();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("bundled corpus holds 49 institutions") {
  const auto& records = bundled::institutions();
  REQUIRE(records.size() == 49);
  const InstitutionRecord& first = records.front();
  CHECK(first.id == "ECCSEL");
  CHECK(first.esfri_area == EsfriArea::Energy);
  CHECK(first.pan_european);
  CHECK(first.in_operation);
  CHECK_FALSE(first.resource_ri);
  CHECK(first.facility_ri);
  CHECK(first.distributed_ri);
  CHECK_FALSE(first.e_ri);
}

TEST_CASE("bundled attribute frequencies match the published profile") {
  FeatureMatrix m = encode_attributes(bundled::institutions());
  REQUIRE(m.n_rows() == 49);
  REQUIRE(m.n_cols() == 12);
  std::vector<int> expected{3, 10, 10, 17, 7, 2, 39, 37, 25, 35, 34, 2};
  for (std::size_t j = 0; j < 12; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 49; ++i) sum += m.values(i, j);
    CHECK_MESSAGE(sum == doctest::Approx(expected[j]), m.col_labels[j]);
  }
}

TEST_CASE("area encoding is one-hot and every value is binary") {
  FeatureMatrix m = encode_attributes(bundled::institutions());
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    double area_sum = 0.0;
    for (std::size_t j = 0; j < 6; ++j) area_sum += m.values(i, j);
    CHECK(area_sum == doctest::Approx(1.0));
    for (std::size_t j = 0; j < m.n_cols(); ++j)
      CHECK((m.values(i, j) == 0.0 || m.values(i, j) == 1.0));
  }
}

TEST_CASE("institution CSV round-trips") {
  const auto& records = bundled::institutions();
  csv::Table t = institutions_to_csv(records);
  auto back = load_institutions(t);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].id == records[i].id);
    CHECK(back[i].name == records[i].name);
    CHECK(back[i].esfri_area == records[i].esfri_area);
    CHECK(back[i].e_ri == records[i].e_ri);
  }
}

TEST_CASE("institution loader rejects malformed rows") {
  std::string header =
      "id,name,esfri_area,pan_european,in_operation,resource_ri,facility_ri,distributed_ri,e_ri";
  std::string header_msg = "attribute CSV header must be " + header;
  CHECK_THROWS_WITH_AS(load_institutions(csv::parse("id,name\nA,B\n")), header_msg.c_str(),
                       InputError);
  CHECK_THROWS_WITH_AS(load_institutions(csv::parse(header + "\nA,N,7,0,0,0,0,0,0\n")),
                       "line 2, column esfri_area: must be in 1..6, got 7", InputError);
  CHECK_THROWS_WITH_AS(load_institutions(csv::parse(header + "\nA,N,1,2,0,0,0,0,0\n")),
                       "line 2, column pan_european: flag must be 0 or 1, got '2'", InputError);
  CHECK_THROWS_WITH_AS(
      load_institutions(csv::parse(header + "\nA,N,1,0,0,0,0,0,0\nA,M,2,0,0,0,0,0,0\n")),
      "duplicate id: A", InputError);
}

TEST_CASE("bundled registry lists the 19 rated indicators") {
  const auto& reg = registry();
  REQUIRE(reg.entries.size() == 19);
  std::vector<int> numbers;
  for (const auto& e : reg.entries) numbers.push_back(e.number);
  std::vector<int> expected{1, 2, 3, 4, 5, 6, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  CHECK(numbers == expected);
  CHECK(reg.column_names().front() == "ind_1");
  CHECK(reg.column_names().back() == "ind_20");
  for (const auto& e : reg.entries) CHECK_FALSE(e.label.empty());
}

TEST_CASE("registry JSON round-trips") {
  IndicatorRegistry back = IndicatorRegistry::parse(small_registry_json());
  REQUIRE(back.entries.size() == registry().entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    CHECK(back.entries[i].number == registry().entries[i].number);
    CHECK(back.entries[i].label == registry().entries[i].label);
  }
}

TEST_CASE("registry parser validates structure") {
  CHECK_THROWS_AS(IndicatorRegistry::parse("not json"), InputError);
  CHECK_THROWS_AS(IndicatorRegistry::parse("{}"), InputError);
  CHECK_THROWS_AS(IndicatorRegistry::parse(R"({"indicators": [{"number": 1}]})"), InputError);
}

TEST_CASE("ratings load with columns in any order") {
  std::string text = "id,ind_2,ind_1";
  for (int n = 3; n <= 20; ++n)
    if (n != 7) text += ",ind_" + std::to_string(n);
  text += "\nR1";
  for (int c = 0; c < 19; ++c) text += ",2.5";
  text += "\n";
  FeatureMatrix m = load_ratings(csv::parse(text), registry());
  REQUIRE(m.n_rows() == 1);
  REQUIRE(m.n_cols() == 19);
  CHECK(m.col_labels.front() == "ind_1");
  CHECK(m.col_labels[1] == "ind_2");
  for (std::size_t j = 0; j < 19; ++j) CHECK(m.values(0, j) == doctest::Approx(2.5));
}

TEST_CASE("ratings loader rejects bad columns and values") {
  auto header = [](const std::string& extra) {
    std::string h = "id";
    for (int n = 1; n <= 20; ++n)
      if (n != 7) h += ",ind_" + std::to_string(n);
    return h + extra;
  };
  std::string row19 = "\nR1,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0,2.0";
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse("ind_1,id\n2.0,R1\n"), registry()),
                       "rating CSV header must start with id", InputError);
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(header(",ind_7") + row19 + ",2.0,2.0\n"), registry()),
                       "unknown indicator column: ind_7", InputError);
  std::string missing = "id";
  for (int n = 1; n <= 19; ++n)
    if (n != 7) missing += ",ind_" + std::to_string(n);
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(missing + row19 + "\n"), registry()),
                       "missing indicator column: ind_20", InputError);
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(header(",ind_1") + row19 + ",2.0,2.0\n"), registry()),
                       "duplicate indicator column: ind_1", InputError);
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(header("") + row19 + ",4.5\n"), registry()),
                       "line 2, column ind_20: rating outside the 1..4 scale: 4.5", InputError);
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(header("") + row19 + ",3.7\n"), registry()),
                       "line 2, column ind_20: rating not on half-point scale: 3.7", InputError);
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(header("") + row19 + ",\n"), registry()),
                       "line 2, column ind_20: missing rating", InputError);
}

TEST_CASE("mean imputation fills missing cells on the half-point grid") {
  std::string text = "id";
  for (int n = 1; n <= 20; ++n)
    if (n != 7) text += ",ind_" + std::to_string(n);
  auto row = [](const std::string& id, const std::string& first) {
    std::string r = "\n" + id + "," + first;
    for (int c = 1; c < 19; ++c) r += ",2.0";
    return r;
  };
  text += row("R1", "1.0") + row("R2", "") + row("R3", "3.5") + "\n";
  std::vector<std::string> notes;
  FeatureMatrix m = load_ratings(csv::parse(text), registry(), true, &notes);
  // mean of {1.0, 3.5} = 2.25, snapped to the nearest half point away from zero.
  CHECK(m.values(1, 0) == doctest::Approx(2.5));
  REQUIRE(notes.size() == 1);
  CHECK(notes[0] == "imputed 1 missing cell(s) in ind_1 with 2.5");

  std::string empty_col = "id";
  for (int n = 1; n <= 20; ++n)
    if (n != 7) empty_col += ",ind_" + std::to_string(n);
  empty_col += row("R1", "") + row("R2", "") + "\n";
  CHECK_THROWS_WITH_AS(load_ratings(csv::parse(empty_col), registry(), true),
                       "column ind_1 has no observed ratings to impute from", InputError);
}

TEST_CASE("ratings CSV round-trips through formatting") {
  RatingCountTable counts = bundled::rating_counts();
  FeatureMatrix expanded = expand_counts(counts);
  csv::Table t = ratings_to_csv(expanded);
  FeatureMatrix back = load_ratings(t, registry());
  REQUIRE(back.n_rows() == expanded.n_rows());
  REQUIRE(back.n_cols() == expanded.n_cols());
  CHECK(back.row_ids == expanded.row_ids);
  for (std::size_t i = 0; i < back.n_rows(); ++i)
    for (std::size_t j = 0; j < back.n_cols(); ++j)
      CHECK(back.values(i, j) == expanded.values(i, j));
}

TEST_CASE("bundled counts cover 19 indicators with equal totals") {
  const RatingCountTable& counts = bundled::rating_counts();
  REQUIRE(counts.indicator_numbers.size() == 19);
  CHECK(counts.total() == 49);
  // Spot checks against the bundled distribution table.
  CHECK(counts.indicator_numbers[0] == 1);
  CHECK(counts.counts[0] == std::array<long long, 7>{5, 0, 2, 0, 9, 1, 32});
  CHECK(counts.indicator_numbers[6] == 8);
  std::array<long long, 7> ind8{7, 0, 11, 0, 14, 0, 17};
  CHECK(counts.counts[6] == ind8);
}

TEST_CASE("counts loader validates numbers, totals, and signs") {
  std::string header = "indicator,n_1,n_1_5,n_2,n_2_5,n_3,n_3_5,n_4";
  CHECK_THROWS_WITH_AS(load_counts(csv::parse(header + "\n7,1,0,0,0,0,0,0\n")),
                       "line 2, column indicator: invalid indicator number 7", InputError);
  CHECK_THROWS_WITH_AS(load_counts(csv::parse(header + "\n1,1,0,0,0,0,0,0\n1,1,0,0,0,0,0,0\n")),
                       "duplicate indicator 1", InputError);
  CHECK_THROWS_WITH_AS(load_counts(csv::parse(header + "\n1,-1,0,0,0,0,0,1\n")),
                       "line 2, column n_1: negative count", InputError);
  CHECK_THROWS_WITH_AS(load_counts(csv::parse(header + "\n1,1,0,0,0,0,0,0\n2,2,0,0,0,0,0,0\n")),
                       "indicator 2 total 2 differs from 1", InputError);
  CHECK_THROWS_WITH_AS(load_counts(csv::parse(header + "\n")), "rating count CSV has no rows",
                       InputError);
  RatingCountTable t = load_counts(csv::parse(header + "\n3,1,2,0,0,0,0,0\n"));
  CHECK(t.total() == 3);
}

TEST_CASE("counts round-trip through CSV") {
  const RatingCountTable& counts = bundled::rating_counts();
  RatingCountTable back = load_counts(counts_to_csv(counts));
  CHECK(back.indicator_numbers == counts.indicator_numbers);
  CHECK(back.counts == counts.counts);
}

TEST_CASE("expand_counts emits sorted levels with synthetic ids") {
  RatingCountTable small;
  small.indicator_numbers = {1, 2};
  small.counts = {{2, 0, 0, 0, 0, 0, 1}, {0, 0, 3, 0, 0, 0, 0}};
  FeatureMatrix m = expand_counts(small);
  REQUIRE(m.n_rows() == 3);
  CHECK(m.row_ids == std::vector<std::string>{"R1", "R2", "R3"});
  CHECK(m.values(0, 0) == 1.0);
  CHECK(m.values(1, 0) == 1.0);
  CHECK(m.values(2, 0) == 4.0);
  CHECK(m.values(0, 1) == 2.0);
  CHECK(m.values(2, 1) == 2.0);
}

TEST_CASE("tabulate inverts expand_counts") {
  const RatingCountTable& counts = bundled::rating_counts();
  RatingCountTable back = tabulate(expand_counts(counts));
  CHECK(back.indicator_numbers == counts.indicator_numbers);
  CHECK(back.counts == counts.counts);
}

TEST_CASE("bundled constants are byte-identical to the data files") {
  CHECK(csv::read_text_file(std::string(RITYPE_DATA_DIR) + "/annex1.csv") ==
        bundled::institutions_csv());
  CHECK(csv::read_text_file(std::string(RITYPE_DATA_DIR) + "/table3_counts.csv") ==
        bundled::rating_counts_csv());
  CHECK(csv::read_text_file(std::string(RITYPE_DATA_DIR) + "/indicators.json") ==
        bundled::indicator_registry_json());
}

}  // TEST_SUITE
