#pragma once

#include <cstddef>
#include <vector>

namespace ritype {

// Dense row-major matrix of doubles.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return v_.empty(); }

  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Mat identity(std::size_t n);
double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);

// Cholesky factorization a = l l^T for symmetric a. Returns false when a
// pivot falls to or below rel_tol times the largest diagonal entry (the
// matrix is not positive definite at that tolerance).
bool cholesky(const Mat& a, Mat& l, double rel_tol = 1e-12);

// In-place triangular solves against the Cholesky factor.
void forward_solve(const Mat& l, std::vector<double>& b);             // l y = b
void backward_solve_transposed(const Mat& l, std::vector<double>& b); // l^T x = b

struct EigenResult {
  std::vector<double> values;  // descending
  Mat vectors;                 // matching columns
};

// Cyclic Jacobi rotations for a symmetric matrix; sweeps until the largest
// off-diagonal magnitude drops below rel_tol times the input Frobenius norm,
// capped at max_sweeps.
EigenResult jacobi_eigen(Mat s, double rel_tol = 1e-12, int max_sweeps = 100);

// Generalized symmetric eigenproblem b v = lambda w v via Cholesky whitening
// of w. Throws StatError when w is not positive definite. Eigenvalues
// descending; vectors are columns in the original (unwhitened) coordinates.
EigenResult generalized_eigen(const Mat& b, const Mat& w);

}  // namespace ritype
