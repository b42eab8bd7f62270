#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ritype/dataset.hpp"
#include "ritype/hcluster.hpp"

namespace ritype {

// Cluster-conditional categorical distributions over the seven rating levels.
struct SynthConfig {
  std::vector<long long> cluster_sizes;
  std::vector<int> indicator_numbers;
  std::vector<std::vector<std::array<double, 7>>> weights;  // k x p x 7
  std::uint64_t seed = 0;

  std::size_t k() const { return cluster_sizes.size(); }
  std::size_t p() const { return indicator_numbers.size(); }
  long long n() const;
};

struct SynthData {
  FeatureMatrix ratings;
  Partition partition;
};

// Validates sizes, weight shape, and that every cell has positive total weight.
void validate_config(const SynthConfig& cfg);

// Samples every cell independently with a splitmix64 stream seeded once from
// cfg.seed; cells are drawn row by row in cluster order, indicators ascending,
// so identical configs reproduce identical matrices on any platform.
SynthData generate(const SynthConfig& cfg);

// Builds cluster-conditional level distributions whose mixture reproduces the
// target marginals exactly while tilting each cluster along the level index.
// separation 0 keeps every cluster at the pooled distribution; separation 1 is
// the strongest tilt that still preserves the marginals in expectation.
SynthConfig marginal_tilt_config(const RatingCountTable& counts,
                                 const std::vector<long long>& cluster_sizes, double separation,
                                 std::uint64_t seed = 0);
SynthConfig marginal_tilt_config(const RatingCountTable& counts, const Partition& part,
                                 double separation, std::uint64_t seed = 0);

// Expected aggregate level distribution per indicator (p x 7), mixing the
// cluster-conditional distributions by cluster share.
std::vector<std::array<double, 7>> aggregate_level_distribution(const SynthConfig& cfg);

SynthConfig synth_config_from_json(const std::string& text);
std::string synth_config_to_json(const SynthConfig& cfg);

}  // namespace ritype
