#pragma once

#include <span>
#include <vector>

namespace ritype {

struct IndicatorSummary {
  int indicator_number = 0;
  double median = 0.0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, n-1 denominator
};

// Median, mean, and sample standard deviation of a nonempty column; the
// caller fills in indicator_number.
IndicatorSummary summarize(std::span<const double> column);

// Product-moment correlation; throws StatError("zero variance") on a
// constant input.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace ritype
