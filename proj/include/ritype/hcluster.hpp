#pragma once

#include <string>
#include <vector>

#include "ritype/csv.hpp"
#include "ritype/dataset.hpp"

namespace ritype {

struct DistanceMatrix {
  std::vector<std::string> ids;
  Mat d;  // symmetric, zero diagonal
};

// ward_d2 runs the Lance-Williams recurrence on squared distances and
// reports sqrt heights; ward_d applies the same recurrence to the raw
// distances.
enum class WardVariant { ward_d2, ward_d };

WardVariant ward_variant_from_string(const std::string& s);  // "ward-d2" | "ward-d"
const char* to_string(WardVariant v);

struct Merge {
  int left = 0;   // node ids: 0..n-1 leaves, n+t for the cluster made by merge t
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  std::vector<std::string> leaf_ids;
  std::vector<Merge> merges;  // n-1 entries, nondecreasing heights
};

struct Partition {
  std::vector<std::string> ids;
  std::vector<int> labels;  // 1..k
  int k = 0;
};

DistanceMatrix euclidean_distances(const FeatureMatrix& x);

// Agglomerates by minimal merge cost; equal costs are broken toward the
// pair whose (smaller, larger) smallest-leaf-index tuple is lexicographically
// least, which makes the output deterministic and equal to a naive scan.
Dendrogram ward_cluster(const DistanceMatrix& d, WardVariant variant = WardVariant::ward_d2);

// Undoes the last k-1 merges; cluster labels 1..k ordered by each cluster's
// smallest leaf index.
Partition cut(const Dendrogram& tree, int k);

// Hubert-Arabie adjusted Rand index; 1.0 iff the partitions agree up to a
// label permutation.
double adjusted_rand(const Partition& a, const Partition& b);

std::string to_dot(const Dendrogram& tree);       // heights at 4 decimals
std::string merges_to_json(const Dendrogram& tree);

csv::Table partition_to_csv(const Partition& part);
Partition partition_from_csv(const csv::Table& t);
Partition partition_from_csv_file(const std::string& path);

}  // namespace ritype
