#include "ritype/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "ritype/common.hpp"

namespace ritype {

long long SynthConfig::n() const {
  return std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0LL);
}

void validate_config(const SynthConfig& cfg) {
  if (cfg.cluster_sizes.empty()) throw InputError("config has no clusters");
  for (long long s : cfg.cluster_sizes)
    if (s < 1) throw InputError("cluster sizes must be positive");
  if (cfg.indicator_numbers.empty()) throw InputError("config has no indicators");
  std::unordered_set<int> seen;
  for (int num : cfg.indicator_numbers) {
    if (num < 1) throw InputError("indicator numbers must be positive");
    if (!seen.insert(num).second)
      throw InputError("duplicate indicator number: " + std::to_string(num));
  }
  if (cfg.weights.size() != cfg.k())
    throw InputError("weights must have one block per cluster");
  for (std::size_t g = 0; g < cfg.k(); ++g) {
    if (cfg.weights[g].size() != cfg.p())
      throw InputError("weights must have one row per indicator");
    for (std::size_t j = 0; j < cfg.p(); ++j) {
      double total = 0.0;
      for (double w : cfg.weights[g][j]) {
        if (!std::isfinite(w) || w < 0.0)
          throw InputError("weights must be finite and nonnegative");
        total += w;
      }
      if (total <= 0.0)
        throw InputError("zero-weight distribution for cluster " + std::to_string(g + 1) +
                         ", indicator ind_" + std::to_string(cfg.indicator_numbers[j]));
    }
  }
}

SynthData generate(const SynthConfig& cfg) {
  validate_config(cfg);
  long long n = cfg.n();
  std::size_t p = cfg.p();

  int width = 1;
  for (long long v = n; v >= 10; v /= 10) ++width;

  SynthData out;
  out.ratings.col_labels.reserve(p);
  for (int num : cfg.indicator_numbers)
    out.ratings.col_labels.push_back("ind_" + std::to_string(num));
  out.ratings.values = Mat(static_cast<std::size_t>(n), p);
  out.partition.k = static_cast<int>(cfg.k());

  SplitMix64 rng(cfg.seed);
  std::size_t row = 0;
  for (std::size_t g = 0; g < cfg.k(); ++g) {
    for (long long i = 0; i < cfg.cluster_sizes[g]; ++i, ++row) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "S%0*lld", width, static_cast<long long>(row + 1));
      out.ratings.row_ids.emplace_back(buf);
      out.partition.ids.emplace_back(buf);
      out.partition.labels.push_back(static_cast<int>(g + 1));
      for (std::size_t j = 0; j < p; ++j) {
        const auto& w = cfg.weights[g][j];
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        double x = rng.next_double() * total;
        std::size_t pick = 0;
        double acc = 0.0;
        bool found = false;
        for (std::size_t l = 0; l < w.size(); ++l) {
          acc += w[l];
          if (x < acc) {
            pick = l;
            found = true;
            break;
          }
        }
        if (!found)
          for (std::size_t l = w.size(); l-- > 0;)
            if (w[l] > 0.0) {
              pick = l;
              break;
            }
        out.ratings.values(row, j) = kRatingLevels[pick];
      }
    }
  }
  return out;
}

SynthConfig marginal_tilt_config(const RatingCountTable& counts,
                                 const std::vector<long long>& cluster_sizes, double separation,
                                 std::uint64_t seed) {
  if (!(separation >= 0.0 && separation <= 1.0))
    throw ParamError("separation out of range: must lie in [0,1]");
  if (cluster_sizes.empty()) throw InputError("config has no clusters");
  for (long long s : cluster_sizes)
    if (s < 1) throw InputError("cluster sizes must be positive");
  long long n = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0LL);
  long long total = counts.total();
  if (total != n)
    throw InputError("counts total " + std::to_string(total) +
                     " differs from the requested sample size " + std::to_string(n));

  std::size_t k = cluster_sizes.size();
  std::size_t p = counts.indicator_numbers.size();
  constexpr double beta_max = 3.0;

  SynthConfig cfg;
  cfg.cluster_sizes = cluster_sizes;
  cfg.indicator_numbers = counts.indicator_numbers;
  cfg.seed = seed;
  cfg.weights.assign(k, std::vector<std::array<double, 7>>(p));

  std::vector<double> share(k);
  for (std::size_t g = 0; g < k; ++g)
    share[g] = static_cast<double>(cluster_sizes[g]) / static_cast<double>(n);

  for (std::size_t j = 0; j < p; ++j) {
    std::array<double, 7> marginal{};
    for (std::size_t l = 0; l < 7; ++l)
      marginal[l] = static_cast<double>(counts.counts[j][l]) / static_cast<double>(total);

    // Exponential tilt of the level index, one direction per cluster.
    std::vector<std::array<double, 7>> cell(k);
    for (std::size_t g = 0; g < k; ++g) {
      double t = k == 1 ? 0.0 : 2.0 * static_cast<double>(g) / static_cast<double>(k - 1) - 1.0;
      for (std::size_t l = 0; l < 7; ++l)
        cell[g][l] =
            share[g] * marginal[l] * std::exp(beta_max * separation * t * static_cast<double>(l));
    }

    // Iterative proportional fitting back onto both target margins, ending on
    // a column step so mixing by cluster share reproduces the marginal.
    for (int iter = 0; iter < 20000; ++iter) {
      for (std::size_t g = 0; g < k; ++g) {
        double row_sum = std::accumulate(cell[g].begin(), cell[g].end(), 0.0);
        if (row_sum <= 0.0) throw StatError("tilted distribution collapsed to zero");
        double scale = share[g] / row_sum;
        for (double& v : cell[g]) v *= scale;
      }
      for (std::size_t l = 0; l < 7; ++l) {
        double col_sum = 0.0;
        for (std::size_t g = 0; g < k; ++g) col_sum += cell[g][l];
        if (col_sum > 0.0) {
          double scale = marginal[l] / col_sum;
          for (std::size_t g = 0; g < k; ++g) cell[g][l] *= scale;
        }
      }
      double worst = 0.0;
      for (std::size_t g = 0; g < k; ++g) {
        double row_sum = std::accumulate(cell[g].begin(), cell[g].end(), 0.0);
        worst = std::max(worst, std::fabs(row_sum - share[g]));
      }
      if (worst < 1e-15) break;
    }

    for (std::size_t g = 0; g < k; ++g) {
      double row_sum = std::accumulate(cell[g].begin(), cell[g].end(), 0.0);
      for (std::size_t l = 0; l < 7; ++l) cfg.weights[g][j][l] = cell[g][l] / row_sum;
    }
  }
  return cfg;
}

SynthConfig marginal_tilt_config(const RatingCountTable& counts, const Partition& part,
                                 double separation, std::uint64_t seed) {
  std::vector<long long> sizes(static_cast<std::size_t>(part.k), 0);
  for (int label : part.labels) ++sizes[static_cast<std::size_t>(label - 1)];
  return marginal_tilt_config(counts, sizes, separation, seed);
}

std::vector<std::array<double, 7>> aggregate_level_distribution(const SynthConfig& cfg) {
  validate_config(cfg);
  double n = static_cast<double>(cfg.n());
  std::vector<std::array<double, 7>> agg(cfg.p());
  for (std::size_t j = 0; j < cfg.p(); ++j) {
    agg[j].fill(0.0);
    for (std::size_t g = 0; g < cfg.k(); ++g) {
      const auto& w = cfg.weights[g][j];
      double total = std::accumulate(w.begin(), w.end(), 0.0);
      double share = static_cast<double>(cfg.cluster_sizes[g]) / n;
      for (std::size_t l = 0; l < 7; ++l) agg[j][l] += share * w[l] / total;
    }
  }
  return agg;
}

SynthConfig synth_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }

  try {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    if (!j.contains("cluster_sizes")) throw InputError("config is missing cluster_sizes");

    SynthConfig cfg;
    cfg.cluster_sizes = j.at("cluster_sizes").get<std::vector<long long>>();
    cfg.seed = j.value("seed", std::uint64_t{0});

    bool has_weights = j.contains("weights");
    bool has_marginals = j.contains("marginals");
    if (has_weights == has_marginals)
      throw InputError("config needs exactly one of weights or marginals");

    if (has_weights) {
      cfg.weights = j.at("weights").get<std::vector<std::vector<std::array<double, 7>>>>();
      if (j.contains("indicators")) {
        cfg.indicator_numbers = j.at("indicators").get<std::vector<int>>();
      } else {
        for (const auto& entry : bundled::indicators().entries)
          cfg.indicator_numbers.push_back(entry.number);
        if (!cfg.weights.empty() && cfg.weights[0].size() != cfg.indicator_numbers.size())
          throw InputError("indicators are required when weights do not cover " +
                           std::to_string(cfg.indicator_numbers.size()) + " indicators");
      }
      validate_config(cfg);
      return cfg;
    }

    double separation = j.value("separation", 0.0);
    if (!(separation >= 0.0 && separation <= 1.0))
      throw InputError("separation out of range: must lie in [0,1]");
    RatingCountTable counts;
    const auto& marg = j.at("marginals");
    if (marg.is_string() && marg.get<std::string>() == "bundled") {
      counts = bundled::rating_counts();
    } else if (marg.is_object()) {
      counts.indicator_numbers = marg.at("indicators").get<std::vector<int>>();
      auto rows = marg.at("counts").get<std::vector<std::vector<long long>>>();
      if (rows.size() != counts.indicator_numbers.size())
        throw InputError("marginals need one count row per indicator");
      for (const auto& row : rows) {
        if (row.size() != 7) throw InputError("marginal count rows must have seven levels");
        std::array<long long, 7> arr{};
        std::copy(row.begin(), row.end(), arr.begin());
        counts.counts.push_back(arr);
      }
      counts.total();
    } else {
      throw InputError("marginals must be \"bundled\" or an object with indicators and counts");
    }
    try {
      return marginal_tilt_config(counts, cfg.cluster_sizes, separation, cfg.seed);
    } catch (const ParamError& e) {
      throw InputError(e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config field error: ") + e.what());
  }
}

std::string synth_config_to_json(const SynthConfig& cfg) {
  nlohmann::ordered_json j;
  j["cluster_sizes"] = cfg.cluster_sizes;
  j["indicators"] = cfg.indicator_numbers;
  j["seed"] = cfg.seed;
  j["weights"] = cfg.weights;
  return j.dump(2) + "\n";
}

}  // namespace ritype
