#include "ritype/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ritype/common.hpp"

namespace ritype {

IndicatorSummary summarize(std::span<const double> column) {
  if (column.empty()) throw InputError("summarize: empty column");
  std::size_t n = column.size();

  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  IndicatorSummary s;
  s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  double sum = 0.0;
  for (double v : column) sum += v;
  s.mean = sum / static_cast<double>(n);

  if (n > 1) {
    double ss = 0.0;
    for (double v : column) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParamError("pearson: length mismatch");
  if (x.size() < 2) throw ParamError("pearson: need at least two observations");
  std::size_t n = x.size();

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw StatError("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ritype
