#include "ritype/hcluster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "ritype/common.hpp"

namespace ritype {

WardVariant ward_variant_from_string(const std::string& s) {
  if (s == "ward-d2") return WardVariant::ward_d2;
  if (s == "ward-d") return WardVariant::ward_d;
  throw ParamError("unknown ward variant: " + s + " (expected ward-d2 or ward-d)");
}

const char* to_string(WardVariant v) {
  return v == WardVariant::ward_d2 ? "ward-d2" : "ward-d";
}

DistanceMatrix euclidean_distances(const FeatureMatrix& x) {
  if (x.n_rows() == 0 || x.n_cols() == 0) throw InputError("feature matrix is empty");
  std::size_t n = x.n_rows();
  DistanceMatrix dm;
  dm.ids = x.row_ids;
  dm.d = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.n_cols(); ++c) {
        double diff = x.values(i, c) - x.values(j, c);
        s += diff * diff;
      }
      double d = std::sqrt(s);
      dm.d(i, j) = d;
      dm.d(j, i) = d;
    }
  return dm;
}

Dendrogram ward_cluster(const DistanceMatrix& dm, WardVariant variant) {
  std::size_t n = dm.ids.size();
  if (n < 2) throw InputError("clustering needs at least two rows");
  if (dm.d.rows() != n || dm.d.cols() != n) throw InputError("distance matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(dm.d(i, i)) > 1e-12) throw InputError("distance matrix has nonzero diagonal");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dm.d(i, j) < 0.0 || dm.d(j, i) < 0.0) throw InputError("negative distance");
      double tol = 1e-12 * std::max(1.0, std::fabs(dm.d(i, j)));
      if (std::fabs(dm.d(i, j) - dm.d(j, i)) > tol)
        throw InputError("asymmetric distance matrix");
    }
  }

  // Working pairwise costs: squared distances for ward-d2, raw for ward-d.
  Mat a = dm.d;
  if (variant == WardVariant::ward_d2)
    for (double& v : a.data()) v *= v;

  std::vector<bool> active(n, true);
  std::vector<int> size(n, 1);
  std::vector<int> node(n);
  std::iota(node.begin(), node.end(), 0);

  Dendrogram tree;
  tree.leaf_ids = dm.ids;

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (best < 0.0 || a(i, j) < best) {
          best = a(i, j);
          bi = i;
          bj = j;
        }
      }
    }

    double height = variant == WardVariant::ward_d2 ? std::sqrt(best) : best;
    tree.merges.push_back({node[bi], node[bj], height, size[bi] + size[bj]});

    double nij = size[bi] + size[bj];
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == bi || c == bj) continue;
      double updated = ((size[bi] + size[c]) * a(bi, c) + (size[bj] + size[c]) * a(bj, c) -
                        size[c] * a(bi, bj)) /
                       (nij + size[c]);
      a(bi, c) = updated;
      a(c, bi) = updated;
    }
    node[bi] = static_cast<int>(n + step);
    size[bi] += size[bj];
    active[bj] = false;
  }
  return tree;
}

Partition cut(const Dendrogram& tree, int k) {
  std::size_t n = tree.leaf_ids.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw ParamError("k out of range: " + std::to_string(k) + " for " + std::to_string(n) +
                     " rows");

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  // node id -> representative leaf of the cluster it denotes
  std::vector<std::size_t> node_leaf(n + tree.merges.size());
  std::iota(node_leaf.begin(), node_leaf.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  std::size_t to_apply = n - static_cast<std::size_t>(k);
  for (std::size_t t = 0; t < to_apply; ++t) {
    const Merge& m = tree.merges[t];
    std::size_t a = find(node_leaf[static_cast<std::size_t>(m.left)]);
    std::size_t b = find(node_leaf[static_cast<std::size_t>(m.right)]);
    parent[b] = a;
    node_leaf[n + t] = a;
  }
  for (std::size_t t = to_apply; t < tree.merges.size(); ++t)
    node_leaf[n + t] = find(node_leaf[static_cast<std::size_t>(tree.merges[t].left)]);

  // Label clusters 1..k by smallest member leaf index.
  std::map<std::size_t, int> root_label;
  std::vector<std::size_t> smallest;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    if (!root_label.contains(r)) {
      root_label[r] = 0;
      smallest.push_back(i);  // first encounter in index order is the smallest
    }
  }
  std::sort(smallest.begin(), smallest.end());
  for (std::size_t rank = 0; rank < smallest.size(); ++rank)
    root_label[find(smallest[rank])] = static_cast<int>(rank + 1);

  Partition part;
  part.ids = tree.leaf_ids;
  part.k = k;
  part.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) part.labels[i] = root_label[find(i)];
  return part;
}

namespace {

long long comb2(long long x) { return x * (x - 1) / 2; }

}  // namespace

double adjusted_rand(const Partition& a, const Partition& b) {
  if (a.ids.size() != b.ids.size()) throw InputError("partition id mismatch");
  std::unordered_map<std::string, int> b_label;
  for (std::size_t i = 0; i < b.ids.size(); ++i) b_label[b.ids[i]] = b.labels[i];

  std::size_t n = a.ids.size();
  Mat cont(static_cast<std::size_t>(a.k), static_cast<std::size_t>(b.k));
  for (std::size_t i = 0; i < n; ++i) {
    auto it = b_label.find(a.ids[i]);
    if (it == b_label.end()) throw InputError("partition id mismatch: " + a.ids[i]);
    cont(static_cast<std::size_t>(a.labels[i] - 1), static_cast<std::size_t>(it->second - 1)) +=
        1.0;
  }

  long long sum_cells = 0, sum_rows = 0, sum_cols = 0;
  for (std::size_t i = 0; i < cont.rows(); ++i) {
    long long row = 0;
    for (std::size_t j = 0; j < cont.cols(); ++j) {
      long long c = static_cast<long long>(cont(i, j));
      sum_cells += comb2(c);
      row += c;
    }
    sum_rows += comb2(row);
  }
  for (std::size_t j = 0; j < cont.cols(); ++j) {
    long long col = 0;
    for (std::size_t i = 0; i < cont.rows(); ++i) col += static_cast<long long>(cont(i, j));
    sum_cols += comb2(col);
  }

  double total_pairs = static_cast<double>(comb2(static_cast<long long>(n)));
  double expected = static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / total_pairs;
  double maximum = 0.5 * static_cast<double>(sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (static_cast<double>(sum_cells) - expected) / (maximum - expected);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Dendrogram& tree) {
  std::string out = "digraph dendrogram {\n";
  for (std::size_t i = 0; i < tree.leaf_ids.size(); ++i)
    out += "  n" + std::to_string(i) + " [shape=box, label=\"" + dot_escape(tree.leaf_ids[i]) +
           "\"];\n";
  std::size_t n = tree.leaf_ids.size();
  for (std::size_t t = 0; t < tree.merges.size(); ++t) {
    char height[32];
    std::snprintf(height, sizeof height, "%.4f", tree.merges[t].height);
    out += "  n" + std::to_string(n + t) + " [shape=ellipse, label=\"" + height + "\"];\n";
  }
  for (std::size_t t = 0; t < tree.merges.size(); ++t) {
    std::string parent = "n" + std::to_string(n + t);
    out += "  " + parent + " -> n" + std::to_string(tree.merges[t].left) + ";\n";
    out += "  " + parent + " -> n" + std::to_string(tree.merges[t].right) + ";\n";
  }
  out += "}\n";
  return out;
}

std::string merges_to_json(const Dendrogram& tree) {
  nlohmann::ordered_json j;
  j["leaves"] = tree.leaf_ids;
  j["merges"] = nlohmann::ordered_json::array();
  for (const Merge& m : tree.merges)
    j["merges"].push_back(nlohmann::ordered_json{
        {"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  return j.dump(2) + "\n";
}

csv::Table partition_to_csv(const Partition& part) {
  csv::Table t;
  t.header = {"id", "cluster"};
  for (std::size_t i = 0; i < part.ids.size(); ++i)
    t.rows.push_back({part.ids[i], std::to_string(part.labels[i])});
  return t;
}

Partition partition_from_csv(const csv::Table& t) {
  if (t.header != std::vector<std::string>{"id", "cluster"})
    throw InputError("partition CSV header must be id,cluster");
  if (t.rows.empty()) throw InputError("partition CSV has no rows");

  Partition part;
  std::unordered_map<std::string, bool> seen;
  int max_label = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::size_t line = t.line(r);
    if (row[0].empty())
      throw InputError("line " + std::to_string(line) + ", column id: empty id");
    if (seen.contains(row[0])) throw InputError("duplicate id: " + row[0]);
    seen[row[0]] = true;

    int label = 0;
    auto [ptr, ec] = std::from_chars(row[1].data(), row[1].data() + row[1].size(), label);
    if (ec != std::errc() || ptr != row[1].data() + row[1].size() || label < 1)
      throw InputError("line " + std::to_string(line) +
                       ", column cluster: must be a positive integer, got '" + row[1] + "'");
    part.ids.push_back(row[0]);
    part.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  part.k = max_label;

  std::vector<long long> sizes(static_cast<std::size_t>(max_label), 0);
  for (int label : part.labels) ++sizes[static_cast<std::size_t>(label - 1)];
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] == 0)
      throw InputError("cluster labels must cover 1.." + std::to_string(max_label) +
                       " without gaps; cluster " + std::to_string(c + 1) + " is empty");
  return part;
}

Partition partition_from_csv_file(const std::string& path) {
  return partition_from_csv(csv::read_file(path));
}

}  // namespace ritype
