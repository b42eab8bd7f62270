#include "ritype/discriminant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "ritype/common.hpp"
#include "ritype/stats.hpp"

namespace ritype {

Priors priors_from_string(const std::string& s) {
  if (s == "equal") return Priors::equal;
  if (s == "proportional") return Priors::proportional;
  throw ParamError("unknown priors: " + s + " (expected equal or proportional)");
}

const char* to_string(Priors p) { return p == Priors::equal ? "equal" : "proportional"; }

ScatterPair scatter(const FeatureMatrix& x, const Partition& part) {
  if (x.row_ids != part.ids)
    throw InputError("partition ids do not match the rating matrix ids");
  std::size_t n = x.n_rows(), p = x.n_cols();
  if (n == 0 || p == 0) throw InputError("rating matrix is empty");
  if (part.k < 2) throw StatError("discriminant analysis needs at least two clusters");

  ScatterPair s;
  s.n = static_cast<int>(n);
  s.k = part.k;
  s.p = static_cast<int>(p);
  if (s.n <= s.k) throw StatError("need more observations than clusters");

  s.group_sizes.assign(static_cast<std::size_t>(part.k), 0);
  for (int label : part.labels) ++s.group_sizes[static_cast<std::size_t>(label - 1)];
  for (int g = 0; g < part.k; ++g) {
    s.group_labels.push_back(g + 1);
    if (s.group_sizes[static_cast<std::size_t>(g)] < 2)
      throw StatError("cluster " + std::to_string(g + 1) +
                      " has fewer than two members; discriminant analysis is undefined");
  }

  s.grand_mean.assign(p, 0.0);
  s.group_means = Mat(static_cast<std::size_t>(part.k), p);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t g = static_cast<std::size_t>(part.labels[i] - 1);
    for (std::size_t j = 0; j < p; ++j) {
      s.grand_mean[j] += x.values(i, j);
      s.group_means(g, j) += x.values(i, j);
    }
  }
  for (std::size_t j = 0; j < p; ++j) s.grand_mean[j] /= static_cast<double>(n);
  for (std::size_t g = 0; g < static_cast<std::size_t>(part.k); ++g)
    for (std::size_t j = 0; j < p; ++j)
      s.group_means(g, j) /= static_cast<double>(s.group_sizes[g]);

  s.w = Mat(p, p);
  s.b = Mat(p, p);
  s.t = Mat(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t g = static_cast<std::size_t>(part.labels[i] - 1);
    for (std::size_t a = 0; a < p; ++a) {
      double dwa = x.values(i, a) - s.group_means(g, a);
      double dta = x.values(i, a) - s.grand_mean[a];
      for (std::size_t b = a; b < p; ++b) {
        s.w(a, b) += dwa * (x.values(i, b) - s.group_means(g, b));
        s.t(a, b) += dta * (x.values(i, b) - s.grand_mean[b]);
      }
    }
  }
  for (std::size_t g = 0; g < static_cast<std::size_t>(part.k); ++g)
    for (std::size_t a = 0; a < p; ++a) {
      double da = s.group_means(g, a) - s.grand_mean[a];
      for (std::size_t b = a; b < p; ++b)
        s.b(a, b) += s.group_sizes[g] * da * (s.group_means(g, b) - s.grand_mean[b]);
    }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b) {
      s.w(a, b) = s.w(b, a);
      s.b(a, b) = s.b(b, a);
      s.t(a, b) = s.t(b, a);
    }

  for (std::size_t j = 0; j < p; ++j)
    if (s.t(j, j) == 0.0)
      s.warnings.push_back("predictor " +
                           (j < x.col_labels.size() ? x.col_labels[j] : std::to_string(j)) +
                           " is constant");
  return s;
}

DiscriminantModel solve_discriminants(const ScatterPair& s) {
  DiscriminantModel m;
  m.n = s.n;
  m.k = s.k;
  m.p = s.p;
  m.group_labels = s.group_labels;
  m.group_sizes = s.group_sizes;
  m.grand_mean = s.grand_mean;
  m.warnings = s.warnings;

  std::size_t p = static_cast<std::size_t>(s.p);
  double trace = 0.0;
  for (std::size_t j = 0; j < p; ++j) trace += s.w(j, j);

  EigenResult eig;
  bool solved = false;
  double eps = 0.0;
  for (int attempt = 0; !solved; ++attempt) {
    if (attempt > 0) {
      double base = trace / static_cast<double>(s.p);
      eps = base * std::pow(10.0, -9 + attempt);  // 1e-8 * base up to 1e-2 * base
      if (eps > 1e-2 * base || eps <= 0.0)
        throw StatError("within-group scatter is singular beyond ridge repair");
      char buf[64];
      std::snprintf(buf, sizeof buf, "ridge escalated to %g", eps);
      m.regularization_log.push_back(buf);
    }
    Mat w_eps = s.w;
    for (std::size_t j = 0; j < p; ++j) w_eps(j, j) += eps;
    try {
      eig = generalized_eigen(s.b, w_eps);
      solved = true;
    } catch (const StatError&) {
      if (attempt >= 7) throw StatError("within-group scatter is singular beyond ridge repair");
    }
  }
  m.regularization_applied = eps > 0.0;
  m.regularization = eps;

  double lambda_max = eig.values.empty() ? 0.0 : std::max(eig.values.front(), 0.0);
  std::size_t max_r = static_cast<std::size_t>(std::min(s.k - 1, s.p));
  std::size_t r = 0;
  while (r < max_r && r < eig.values.size() && eig.values[r] > 1e-10 * lambda_max &&
         eig.values[r] > 0.0)
    ++r;

  m.r = static_cast<int>(r);
  m.eigenvalues.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(r));
  m.coefficients = Mat(p, r);

  for (std::size_t d = 0; d < r; ++d) {
    std::vector<double> v(p);
    for (std::size_t i = 0; i < p; ++i) v[i] = eig.vectors(i, d);

    // Rescale to unit pooled within-group score variance: v' W v = n - k.
    double quad = 0.0;
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) quad += v[a] * s.w(a, b) * v[b];
    if (quad <= 0.0 && eps > 0.0) {
      quad = 0.0;
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
          double wab = s.w(a, b) + (a == b ? eps : 0.0);
          quad += v[a] * wab * v[b];
        }
    }
    if (quad > 0.0) {
      double scale = std::sqrt(static_cast<double>(s.n - s.k) / quad);
      for (double& c : v) c *= scale;
    } else {
      m.warnings.push_back("discriminant " + std::to_string(d + 1) +
                           " left unscaled (nonpositive within-group variance)");
    }

    std::size_t imax = 0;
    for (std::size_t i = 1; i < p; ++i)
      if (std::fabs(v[i]) > std::fabs(v[imax])) imax = i;
    if (v[imax] < 0.0)
      for (double& c : v) c = -c;

    for (std::size_t i = 0; i < p; ++i) m.coefficients(i, d) = v[i];
  }
  return m;
}

DiscriminantModel finalize_model(DiscriminantModel m, const FeatureMatrix& x,
                                 const Partition& part) {
  if (x.row_ids != part.ids)
    throw InputError("partition ids do not match the rating matrix ids");
  std::size_t n = x.n_rows(), p = x.n_cols(), r = static_cast<std::size_t>(m.r);
  if (static_cast<int>(n) != m.n || static_cast<int>(p) != m.p)
    throw ParamError("model was solved for a different matrix shape");

  m.row_ids = x.row_ids;
  m.predictor_labels = x.col_labels;

  m.scores = Mat(n, r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < r; ++d) {
      double sum = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        sum += (x.values(i, j) - m.grand_mean[j]) * m.coefficients(j, d);
      m.scores(i, d) = sum;
    }

  m.structural_loadings = Mat(p, r);
  std::vector<double> predictor(n), score(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) predictor[i] = x.values(i, j);
    for (std::size_t d = 0; d < r; ++d) {
      for (std::size_t i = 0; i < n; ++i) score[i] = m.scores(i, d);
      try {
        m.structural_loadings(j, d) = pearson(predictor, score);
      } catch (const StatError&) {
        m.structural_loadings(j, d) = 0.0;
        m.warnings.push_back("loading of " + x.col_labels[j] + " on discriminant " +
                             std::to_string(d + 1) + " set to 0 (zero variance)");
      }
    }
  }

  m.centroids = Mat(static_cast<std::size_t>(m.k), r);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t g = static_cast<std::size_t>(part.labels[i] - 1);
    for (std::size_t d = 0; d < r; ++d) m.centroids(g, d) += m.scores(i, d);
  }
  for (std::size_t g = 0; g < static_cast<std::size_t>(m.k); ++g)
    for (std::size_t d = 0; d < r; ++d)
      m.centroids(g, d) /= static_cast<double>(m.group_sizes[g]);

  m.significance.clear();
  if (m.r == 0) {
    m.significance.push_back(wilks_f(m.eigenvalues, m.n, m.k, m.p, 1));
  } else {
    for (int j = 1; j <= m.r; ++j)
      m.significance.push_back(wilks_f(m.eigenvalues, m.n, m.k, m.p, j));
  }
  return m;
}

SignificanceTest wilks_f(const std::vector<double>& eigenvalues, int n, int k, int p,
                         int start_dim) {
  int r = static_cast<int>(eigenvalues.size());
  if (start_dim < 1 || (start_dim > r && !(r == 0 && start_dim == 1)))
    throw ParamError("start_dim out of range");
  if (k < 2) throw StatError("need at least two groups");
  if (n <= p + k - 1) throw StatError("insufficient degrees of freedom");

  SignificanceTest t;
  t.start_dim = start_dim;
  t.wilks_lambda = 1.0;
  for (int j = start_dim - 1; j < r; ++j) t.wilks_lambda /= 1.0 + eigenvalues[static_cast<std::size_t>(j)];

  if (k == 2 && start_dim == 1) {
    t.df1 = p;
    t.df2 = n - p - 1;
    t.f = (1.0 - t.wilks_lambda) / t.wilks_lambda * (static_cast<double>(n - p - 1) / p);
  } else {
    // Rao's approximation for the test of dimensions start_dim..r.
    double a = p - start_dim + 1;
    double b = k - start_dim;
    double num = a * a * b * b - 4.0;
    double den = a * a + b * b - 5.0;
    double s = (num > 0.0 && den > 0.0) ? std::sqrt(num / den) : 1.0;
    double w = n - 1 - (a + b + 1.0) / 2.0;
    t.df1 = static_cast<int>(a * b);
    t.df2 = w * s - t.df1 / 2.0 + 1.0;
    if (t.df2 <= 0.0) throw StatError("insufficient degrees of freedom");
    double ls = std::pow(t.wilks_lambda, 1.0 / s);
    if (ls <= 0.0) {
      t.f = std::numeric_limits<double>::infinity();
      t.p_value = 0.0;
      return t;
    }
    t.f = (1.0 - ls) / ls * (t.df2 / t.df1);
  }
  t.p_value = f_cdf_complement(t.f, t.df1, t.df2);
  return t;
}

namespace {

// Continued fraction for the regularized incomplete beta, modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-12;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) return h;
  }
  throw StatError("incomplete beta continued fraction did not converge");
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double f_cdf_complement(double f, double df1, double df2) {
  if (!std::isfinite(f) || !std::isfinite(df1) || !std::isfinite(df2))
    throw ParamError("f_cdf_complement: nonfinite input");
  if (f < 0.0) throw ParamError("f_cdf_complement: negative F");
  if (df1 <= 0.0 || df2 <= 0.0) throw ParamError("f_cdf_complement: nonpositive degrees of freedom");
  double x = df2 / (df2 + df1 * f);
  return reg_inc_beta(df2 / 2.0, df1 / 2.0, x);
}

int classify(const DiscriminantModel& m, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(m.p))
    throw ParamError("classify: expected " + std::to_string(m.p) + " predictors, got " +
                     std::to_string(x.size()));
  std::size_t r = static_cast<std::size_t>(m.r);
  std::vector<double> score(r, 0.0);
  for (std::size_t d = 0; d < r; ++d)
    for (std::size_t j = 0; j < static_cast<std::size_t>(m.p); ++j)
      score[d] += (x[j] - m.grand_mean[j]) * m.coefficients(j, d);

  int best_label = m.group_labels.empty() ? 1 : m.group_labels.front();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < static_cast<std::size_t>(m.k); ++g) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < r; ++d) {
      double diff = score[d] - m.centroids(g, d);
      d2 += diff * diff;
    }
    double value = -0.5 * d2;
    if (m.priors == Priors::proportional)
      value += std::log(static_cast<double>(m.group_sizes[g]) / m.n);
    if (value > best) {
      best = value;
      best_label = m.group_labels[g];
    }
  }
  return best_label;
}

Partition classify_all(const DiscriminantModel& m, const FeatureMatrix& x) {
  if (x.n_cols() != static_cast<std::size_t>(m.p))
    throw ParamError("classify: predictor count mismatch");
  Partition part;
  part.ids = x.row_ids;
  part.k = m.k;
  std::vector<double> row(x.n_cols());
  for (std::size_t i = 0; i < x.n_rows(); ++i) {
    for (std::size_t j = 0; j < x.n_cols(); ++j) row[j] = x.values(i, j);
    part.labels.push_back(classify(m, row));
  }
  return part;
}

ConfusionTable confusion(const Partition& reference, const Partition& predicted) {
  if (reference.k != predicted.k)
    throw InputError("partitions have different cluster counts");
  if (reference.ids.size() != predicted.ids.size()) throw InputError("partition id mismatch");
  std::unordered_map<std::string, int> pred;
  for (std::size_t i = 0; i < predicted.ids.size(); ++i)
    pred[predicted.ids[i]] = predicted.labels[i];

  std::vector<std::vector<long long>> counts(
      static_cast<std::size_t>(reference.k),
      std::vector<long long>(static_cast<std::size_t>(reference.k), 0));
  for (std::size_t i = 0; i < reference.ids.size(); ++i) {
    auto it = pred.find(reference.ids[i]);
    if (it == pred.end()) throw InputError("partition id mismatch: " + reference.ids[i]);
    ++counts[static_cast<std::size_t>(reference.labels[i] - 1)]
            [static_cast<std::size_t>(it->second - 1)];
  }
  return confusion_from_counts(counts);
}

ConfusionTable confusion_from_counts(const std::vector<std::vector<long long>>& counts) {
  if (counts.empty()) throw InputError("confusion table is empty");
  ConfusionTable t;
  t.counts = counts;
  long long diag = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != counts.size()) throw InputError("confusion table is not square");
    t.labels.push_back(static_cast<int>(i + 1));
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] < 0) throw InputError("confusion table has a negative count");
      t.total += counts[i][j];
      if (i == j) diag += counts[i][j];
    }
  }
  if (t.total == 0) throw InputError("confusion table has zero total");
  t.accuracy = static_cast<double>(diag) / static_cast<double>(t.total);
  return t;
}

namespace {

nlohmann::ordered_json mat_to_json(const Mat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string model_to_json(const DiscriminantModel& m) {
  nlohmann::ordered_json j;
  j["n"] = m.n;
  j["k"] = m.k;
  j["p"] = m.p;
  j["retained"] = m.r;
  j["priors"] = to_string(m.priors);
  j["predictors"] = m.predictor_labels;
  j["groups"] = nlohmann::ordered_json{{"labels", m.group_labels}, {"sizes", m.group_sizes}};
  j["grand_mean"] = m.grand_mean;
  j["eigenvalues"] = m.eigenvalues;
  j["coefficients"] = mat_to_json(m.coefficients);
  j["structural_loadings"] = mat_to_json(m.structural_loadings);
  j["centroids"] = mat_to_json(m.centroids);
  j["significance"] = nlohmann::ordered_json::array();
  for (const auto& t : m.significance) {
    j["significance"].push_back(nlohmann::ordered_json{{"start_dim", t.start_dim},
                                                       {"wilks_lambda", t.wilks_lambda},
                                                       {"F", t.f},
                                                       {"df1", t.df1},
                                                       {"df2", t.df2},
                                                       {"p_value", t.p_value}});
  }
  j["regularization"] = nlohmann::ordered_json{{"applied", m.regularization_applied},
                                               {"ridge", m.regularization},
                                               {"log", m.regularization_log}};
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

}  // namespace ritype
