#include "ritype/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ritype/common.hpp"

namespace ritype {

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw ParamError("matmul: dimension mismatch");
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Mat identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

bool cholesky(const Mat& a, Mat& l, double rel_tol) {
  if (a.rows() != a.cols()) throw ParamError("cholesky: matrix not square");
  std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  if (max_diag <= 0.0) return false;

  l = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (s <= rel_tol * max_diag) return false;
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return true;
}

void forward_solve(const Mat& l, std::vector<double>& b) {
  std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
    b[i] = s / l(i, i);
  }
}

void backward_solve_transposed(const Mat& l, std::vector<double>& b) {
  std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
    b[ii] = s / l(ii, ii);
  }
}

EigenResult jacobi_eigen(Mat s, double rel_tol, int max_sweeps) {
  if (s.rows() != s.cols()) throw ParamError("jacobi_eigen: matrix not square");
  std::size_t n = s.rows();
  Mat v = identity(n);
  double threshold = rel_tol * frobenius_norm(s);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::fabs(s(i, j)));
    if (off <= threshold) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = s(p, q);
        if (apq == 0.0) continue;
        double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = s(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return diag[a] > diag[b]; });

  EigenResult r;
  r.values.resize(n);
  r.vectors = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    r.values[j] = diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
  }
  return r;
}

EigenResult generalized_eigen(const Mat& b, const Mat& w) {
  if (b.rows() != b.cols() || w.rows() != w.cols() || b.rows() != w.rows())
    throw ParamError("generalized_eigen: dimension mismatch");
  std::size_t p = w.rows();

  Mat l;
  if (!cholesky(w, l)) throw StatError("matrix not positive definite");

  // s = l^-1 b l^-T, assembled column by column and symmetrized.
  Mat m(p, p);
  std::vector<double> col(p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < p; ++i) col[i] = b(i, j);
    forward_solve(l, col);
    for (std::size_t i = 0; i < p; ++i) m(i, j) = col[i];  // m = l^-1 b
  }
  Mat s(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < p; ++i) col[i] = m(j, i);  // row j of m
    forward_solve(l, col);
    for (std::size_t i = 0; i < p; ++i) s(i, j) = col[i];  // s = l^-1 m^T
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      double avg = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }

  EigenResult eig = jacobi_eigen(std::move(s));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < p; ++i) col[i] = eig.vectors(i, j);
    backward_solve_transposed(l, col);
    for (std::size_t i = 0; i < p; ++i) eig.vectors(i, j) = col[i];
  }
  return eig;
}

}  // namespace ritype
