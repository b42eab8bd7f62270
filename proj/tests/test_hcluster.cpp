#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "ritype/common.hpp"
#include "ritype/dataset.hpp"
#include "ritype/hcluster.hpp"

using namespace ritype;

namespace {

FeatureMatrix one_dim(const std::vector<double>& xs) {
  FeatureMatrix m;
  m.col_labels = {"x"};
  m.values = Mat(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m.row_ids.push_back("P" + std::to_string(i));
    m.values(i, 0) = xs[i];
  }
  return m;
}

// Ward merge cost between disjoint index sets, straight from the centroid
// formula: 2 |A||B| / (|A|+|B|) * ||c_A - c_B||^2.
double ward_cost(const FeatureMatrix& m, const std::vector<std::size_t>& a,
                 const std::vector<std::size_t>& b) {
  std::size_t p = m.n_cols();
  std::vector<double> ca(p, 0.0), cb(p, 0.0);
  for (std::size_t i : a)
    for (std::size_t j = 0; j < p; ++j) ca[j] += m.values(i, j);
  for (std::size_t i : b)
    for (std::size_t j = 0; j < p; ++j) cb[j] += m.values(i, j);
  double d2 = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double diff = ca[j] / static_cast<double>(a.size()) - cb[j] / static_cast<double>(b.size());
    d2 += diff * diff;
  }
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  return 2.0 * na * nb / (na + nb) * d2;
}

std::vector<int> multiset_sizes(const Partition& part) {
  std::vector<int> sizes(static_cast<std::size_t>(part.k), 0);
  for (int label : part.labels) ++sizes[static_cast<std::size_t>(label - 1)];
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

}  // namespace

TEST_SUITE("hcluster") {

TEST_CASE("euclidean distances on a 3-4-5 triangle") {
  FeatureMatrix m;
  m.row_ids = {"a", "b", "c"};
  m.col_labels = {"x", "y"};
  m.values = Mat(3, 2);
  m.values(1, 0) = 3.0;
  m.values(2, 1) = 4.0;
  DistanceMatrix d = euclidean_distances(m);
  CHECK(d.d(0, 1) == doctest::Approx(3.0));
  CHECK(d.d(0, 2) == doctest::Approx(4.0));
  CHECK(d.d(1, 2) == doctest::Approx(5.0));
  CHECK(d.d(1, 0) == doctest::Approx(3.0));
  CHECK(d.d(0, 0) == 0.0);

  FeatureMatrix empty;
  CHECK_THROWS_WITH_AS(euclidean_distances(empty), "feature matrix is empty", InputError);
}

TEST_CASE("ward variants parse and print") {
  CHECK(ward_variant_from_string("ward-d2") == WardVariant::ward_d2);
  CHECK(ward_variant_from_string("ward-d") == WardVariant::ward_d);
  CHECK(std::string(to_string(WardVariant::ward_d2)) == "ward-d2");
  CHECK(std::string(to_string(WardVariant::ward_d)) == "ward-d");
  CHECK_THROWS_AS(ward_variant_from_string("average"), ParamError);
}

TEST_CASE("three collinear points merge at hand-computed heights") {
  FeatureMatrix m = one_dim({0.0, 2.0, 3.0});
  DistanceMatrix d = euclidean_distances(m);

  Dendrogram d2 = ward_cluster(d, WardVariant::ward_d2);
  REQUIRE(d2.merges.size() == 2);
  CHECK(d2.merges[0].left == 1);
  CHECK(d2.merges[0].right == 2);
  CHECK(d2.merges[0].height == doctest::Approx(1.0));
  CHECK(d2.merges[0].size == 2);
  CHECK(d2.merges[1].left == 0);
  CHECK(d2.merges[1].right == 3);
  CHECK(d2.merges[1].height == doctest::Approx(std::sqrt(25.0 / 3.0)));
  CHECK(d2.merges[1].size == 3);
  // Same number from the centroid form of the Ward cost.
  CHECK(d2.merges[1].height == doctest::Approx(std::sqrt(ward_cost(m, {0}, {1, 2}))));

  // The raw-distance variant runs the same recurrence on unsquared input:
  // d(0,{1,2}) = (2*2 + 2*3 - 1)/3 = 3.
  Dendrogram d1 = ward_cluster(d, WardVariant::ward_d);
  CHECK(d1.merges[0].height == doctest::Approx(1.0));
  CHECK(d1.merges[1].height == doctest::Approx(3.0));
}

TEST_CASE("two points merge at their distance under both variants") {
  FeatureMatrix m = one_dim({1.0, 3.5});
  DistanceMatrix d = euclidean_distances(m);
  CHECK(ward_cluster(d, WardVariant::ward_d2).merges[0].height == doctest::Approx(2.5));
  CHECK(ward_cluster(d, WardVariant::ward_d).merges[0].height == doctest::Approx(2.5));
}

TEST_CASE("merge heights are nondecreasing on fuzzed data") {
  SplitMix64 rng(555);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 3 + rng.next() % 20;
    std::size_t p = 1 + rng.next() % 4;
    FeatureMatrix m;
    m.values = Mat(n, p);
    for (std::size_t i = 0; i < n; ++i) {
      m.row_ids.push_back("r" + std::to_string(i));
      for (std::size_t j = 0; j < p; ++j) m.values(i, j) = rng.next_double() * 4.0;
    }
    for (std::size_t j = 0; j < p; ++j) m.col_labels.push_back("c" + std::to_string(j));
    for (WardVariant v : {WardVariant::ward_d2, WardVariant::ward_d}) {
      Dendrogram tree = ward_cluster(euclidean_distances(m), v);
      REQUIRE(tree.merges.size() == n - 1);
      for (std::size_t t = 1; t < tree.merges.size(); ++t)
        CHECK(tree.merges[t].height >= tree.merges[t - 1].height - 1e-12);
      CHECK(tree.merges.back().size == static_cast<int>(n));
    }
  }
}

TEST_CASE("ward_cluster rejects malformed distance input") {
  FeatureMatrix single = one_dim({1.0});
  CHECK_THROWS_WITH_AS(ward_cluster(euclidean_distances(single)),
                       "clustering needs at least two rows", InputError);

  DistanceMatrix bad;
  bad.ids = {"a", "b"};
  bad.d = Mat(2, 2);
  bad.d(0, 0) = 0.5;
  CHECK_THROWS_WITH_AS(ward_cluster(bad), "distance matrix has nonzero diagonal", InputError);

  DistanceMatrix neg;
  neg.ids = {"a", "b"};
  neg.d = Mat(2, 2);
  neg.d(0, 1) = -1.0;
  neg.d(1, 0) = -1.0;
  CHECK_THROWS_WITH_AS(ward_cluster(neg), "negative distance", InputError);

  DistanceMatrix asym;
  asym.ids = {"a", "b"};
  asym.d = Mat(2, 2);
  asym.d(0, 1) = 1.0;
  asym.d(1, 0) = 2.0;
  CHECK_THROWS_WITH_AS(ward_cluster(asym), "asymmetric distance matrix", InputError);
}

TEST_CASE("cut produces labels ordered by smallest leaf") {
  FeatureMatrix m = one_dim({0.0, 10.0, 0.1, 10.1, 20.0});
  Dendrogram tree = ward_cluster(euclidean_distances(m));

  Partition p3 = cut(tree, 3);
  CHECK(p3.k == 3);
  CHECK(p3.labels == std::vector<int>{1, 2, 1, 2, 3});

  Partition p1 = cut(tree, 1);
  CHECK(p1.labels == std::vector<int>{1, 1, 1, 1, 1});

  Partition p5 = cut(tree, 5);
  CHECK(p5.labels == std::vector<int>{1, 2, 3, 4, 5});

  CHECK_THROWS_WITH_AS(cut(tree, 0), "k out of range: 0 for 5 rows", ParamError);
  CHECK_THROWS_WITH_AS(cut(tree, 6), "k out of range: 6 for 5 rows", ParamError);
}

TEST_CASE("two separated blobs split perfectly at k=2") {
  SplitMix64 rng(808);
  FeatureMatrix m;
  m.col_labels = {"x", "y"};
  m.values = Mat(16, 2);
  Partition truth;
  truth.k = 2;
  for (std::size_t i = 0; i < 16; ++i) {
    bool second = i >= 8;
    m.row_ids.push_back("b" + std::to_string(i));
    truth.ids.push_back(m.row_ids.back());
    truth.labels.push_back(second ? 2 : 1);
    m.values(i, 0) = (second ? 100.0 : 0.0) + rng.next_double();
    m.values(i, 1) = rng.next_double();
  }
  Partition got = cut(ward_cluster(euclidean_distances(m)), 2);
  got.ids = truth.ids;
  CHECK(adjusted_rand(got, truth) == doctest::Approx(1.0));
}

TEST_CASE("adjusted rand handles agreement, independence, and opposition") {
  Partition a, b;
  a.ids = b.ids = {"1", "2", "3", "4"};
  a.k = b.k = 2;
  a.labels = {1, 1, 2, 2};
  b.labels = {2, 2, 1, 1};
  CHECK(adjusted_rand(a, b) == doctest::Approx(1.0));  // same up to relabeling

  b.labels = {1, 2, 1, 2};
  double ari = adjusted_rand(a, b);
  CHECK(ari == doctest::Approx(-0.5));

  // Brute-force pair agreement for the same pair of partitions.
  long long together_both = 0, split_both = 0, mixed = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      bool ta = a.labels[i] == a.labels[j];
      bool tb = b.labels[i] == b.labels[j];
      if (ta && tb) ++together_both;
      else if (!ta && !tb) ++split_both;
      else ++mixed;
    }
  CHECK(together_both == 0);
  CHECK(split_both == 2);
  CHECK(mixed == 4);

  Partition c = a;
  c.ids = {"1", "2", "3", "5"};
  CHECK_THROWS_AS(adjusted_rand(a, c), InputError);
}

TEST_CASE("bundled corpus cuts to the published cluster sizes") {
  FeatureMatrix m = encode_attributes(bundled::institutions());
  Dendrogram tree = ward_cluster(euclidean_distances(m), WardVariant::ward_d2);
  CHECK(multiset_sizes(cut(tree, 5)) == std::vector<int>{9, 9, 10, 10, 11});
  CHECK(multiset_sizes(cut(tree, 2)) == std::vector<int>{20, 29});
}

TEST_CASE("clustering is invariant to row permutations up to relabeling") {
  FeatureMatrix m = encode_attributes(bundled::institutions());
  Partition base = cut(ward_cluster(euclidean_distances(m)), 5);

  SplitMix64 rng(99);
  std::vector<std::size_t> order(m.n_rows());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next() % i]);

  FeatureMatrix shuffled;
  shuffled.col_labels = m.col_labels;
  shuffled.values = Mat(m.n_rows(), m.n_cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled.row_ids.push_back(m.row_ids[order[i]]);
    for (std::size_t j = 0; j < m.n_cols(); ++j)
      shuffled.values(i, j) = m.values(order[i], j);
  }
  Partition perm = cut(ward_cluster(euclidean_distances(shuffled)), 5);
  CHECK(adjusted_rand(base, perm) == doctest::Approx(1.0));
}

TEST_CASE("dendrogram exports well-formed DOT and JSON") {
  FeatureMatrix m = one_dim({0.0, 2.0, 3.0});
  m.row_ids = {"plain", "with\"quote", "back\\slash"};
  Dendrogram tree = ward_cluster(euclidean_distances(m));

  std::string dot = to_dot(tree);
  CHECK(dot.find("digraph dendrogram {") == 0);
  CHECK(dot.find("n0 [shape=box, label=\"plain\"]") != std::string::npos);
  CHECK(dot.find("with\\\"quote") != std::string::npos);
  CHECK(dot.find("back\\\\slash") != std::string::npos);
  CHECK(dot.find("label=\"1.0000\"") != std::string::npos);
  CHECK(dot.find("n4 -> n0;") != std::string::npos);
  CHECK(dot.back() == '\n');

  nlohmann::json j = nlohmann::json::parse(merges_to_json(tree));
  REQUIRE(j.at("merges").size() == 2);
  CHECK(j.at("leaves").size() == 3);
  CHECK(j["merges"][0]["left"] == 1);
  CHECK(j["merges"][0]["right"] == 2);
  CHECK(j["merges"][0]["size"] == 2);
  CHECK(j["merges"][1]["height"].get<double>() == doctest::Approx(std::sqrt(25.0 / 3.0)));
}

TEST_CASE("partition CSV round-trips and validates") {
  Partition part;
  part.ids = {"b", "a", "c"};
  part.labels = {2, 1, 2};
  part.k = 2;
  Partition back = partition_from_csv(partition_to_csv(part));
  CHECK(back.ids == part.ids);
  CHECK(back.labels == part.labels);
  CHECK(back.k == 2);

  CHECK_THROWS_WITH_AS(partition_from_csv(csv::parse("id,label\na,1\n")),
                       "partition CSV header must be id,cluster", InputError);
  CHECK_THROWS_WITH_AS(partition_from_csv(csv::parse("id,cluster\n")),
                       "partition CSV has no rows", InputError);
  CHECK_THROWS_WITH_AS(partition_from_csv(csv::parse("id,cluster\na,1\na,2\n")),
                       "duplicate id: a", InputError);
  CHECK_THROWS_WITH_AS(partition_from_csv(csv::parse("id,cluster\na,0\n")),
                       "line 2, column cluster: must be a positive integer, got '0'", InputError);
  CHECK_THROWS_WITH_AS(partition_from_csv(csv::parse("id,cluster\na,1\nb,3\n")),
                       "cluster labels must cover 1..3 without gaps; cluster 2 is empty",
                       InputError);
}

}  // TEST_SUITE
