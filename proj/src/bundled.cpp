#include "ritype/dataset.hpp"

#include "bundled_data.inc"

namespace ritype::bundled {

const char* institutions_csv() { return kInstitutionsCsv; }
const char* rating_counts_csv() { return kRatingCountsCsv; }
const char* indicator_registry_json() { return kIndicatorRegistryJson; }

const std::vector<InstitutionRecord>& institutions() {
  static const std::vector<InstitutionRecord> records =
      load_institutions(csv::parse(kInstitutionsCsv));
  return records;
}

const RatingCountTable& rating_counts() {
  static const RatingCountTable table = load_counts(csv::parse(kRatingCountsCsv));
  return table;
}

const IndicatorRegistry& indicators() {
  static const IndicatorRegistry registry = IndicatorRegistry::parse(kIndicatorRegistryJson);
  return registry;
}

}  // namespace ritype::bundled
