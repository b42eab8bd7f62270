#pragma once

#include <span>
#include <string>
#include <vector>

#include "ritype/dataset.hpp"
#include "ritype/hcluster.hpp"
#include "ritype/linalg.hpp"

namespace ritype {

struct ScatterPair {
  Mat w;  // within-group scatter, p x p
  Mat b;  // between-group scatter
  Mat t;  // total scatter
  std::vector<int> group_labels;  // 1..k
  std::vector<int> group_sizes;
  Mat group_means;                // k x p
  std::vector<double> grand_mean; // p
  int n = 0;
  int k = 0;
  int p = 0;
  std::vector<std::string> warnings;
};

enum class Priors { equal, proportional };

Priors priors_from_string(const std::string& s);  // "equal" | "proportional"
const char* to_string(Priors p);

struct SignificanceTest {
  int start_dim = 1;        // tests dimensions start_dim..r
  double wilks_lambda = 1.0;
  double f = 0.0;
  int df1 = 0;
  double df2 = 0.0;         // fractional under the Rao approximation
  double p_value = 1.0;
};

struct DiscriminantModel {
  int n = 0, k = 0, p = 0, r = 0;  // r = retained discriminants
  std::vector<std::string> predictor_labels;
  std::vector<std::string> row_ids;
  std::vector<int> group_labels;   // 1..k
  std::vector<int> group_sizes;
  std::vector<double> grand_mean;
  std::vector<double> eigenvalues; // descending, r entries
  Mat coefficients;        // p x r, unit pooled within-group score variance
  Mat scores;              // n x r
  Mat structural_loadings; // p x r, pearson(predictor, score)
  Mat centroids;           // k x r
  std::vector<SignificanceTest> significance;  // sequential tests j..r
  bool regularization_applied = false;
  double regularization = 0.0;
  std::vector<std::string> regularization_log;
  std::vector<std::string> warnings;
  Priors priors = Priors::equal;
};

// The partition must list the same ids in the same order as the matrix.
ScatterPair scatter(const FeatureMatrix& x, const Partition& part);

// Solves b v = lambda w v by Cholesky whitening and Jacobi sweeps; retains
// eigenpairs above 1e-10 of the largest, at most min(k-1, p). A singular w
// is retried with ridge w + eps I, eps from 1e-8 to 1e-2 of trace(w)/p in
// factor-10 steps; each escalation is logged on the model.
DiscriminantModel solve_discriminants(const ScatterPair& s);

// Fills scores, structural loadings, centroids, and the sequential
// significance tests.
DiscriminantModel finalize_model(DiscriminantModel m, const FeatureMatrix& x,
                                 const Partition& part);

// Wilks' lambda over eigenvalues start_dim..r with the exact two-group F
// transform when k = 2 and start_dim = 1, Rao's approximation otherwise.
SignificanceTest wilks_f(const std::vector<double>& eigenvalues, int n, int k, int p,
                         int start_dim);

// Upper tail of the F distribution via the regularized incomplete beta
// function (continued fraction, relative tolerance 1e-12).
double f_cdf_complement(double f, double df1, double df2);

// Nearest-centroid label in canonical space; proportional priors subtract
// log-prior from half the squared distance; ties go to the smaller label.
int classify(const DiscriminantModel& m, std::span<const double> x);
Partition classify_all(const DiscriminantModel& m, const FeatureMatrix& x);

struct ConfusionTable {
  std::vector<int> labels;                    // 1..k
  std::vector<std::vector<long long>> counts; // reference rows x predicted cols
  long long total = 0;
  double accuracy = 0.0;                      // trace / total
};

ConfusionTable confusion(const Partition& reference, const Partition& predicted);
ConfusionTable confusion_from_counts(const std::vector<std::vector<long long>>& counts);

std::string model_to_json(const DiscriminantModel& m);

}  // namespace ritype
