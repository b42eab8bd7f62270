#pragma once

#include <array>
#include <string>
#include <vector>

#include "ritype/csv.hpp"
#include "ritype/dataset.hpp"
#include "ritype/discriminant.hpp"

namespace ritype {

// Half-up rounding at the printed precision, then fixed formatting.
std::string format_fixed(double x, int digits);

// Percentage with two decimals and a trailing percent sign.
std::string format_percent(double fraction);

// "F(df1,df2) = x.xx, p = 0.xxxx"; fractional df2 printed with two decimals.
std::string significance_line(const SignificanceTest& t);

struct SummaryRow {
  int indicator_number = 0;
  std::string label;
  std::array<long long, 7> counts{};
  double median = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

// Level counts plus median/mean/sd per indicator, labels resolved through the
// registry when the indicator number is known there.
std::vector<SummaryRow> build_summary(const RatingCountTable& counts,
                                      const IndicatorRegistry& registry);

std::string markdown_summary(const std::vector<SummaryRow>& rows);
csv::Table csv_summary(const std::vector<SummaryRow>& rows);

// Full analysis report: significance, loadings, centroids, confusion table,
// warnings. The optional cross-validated table is labeled as such.
std::string markdown_report(const DiscriminantModel& model, const ConfusionTable& resubstitution,
                            const IndicatorRegistry& registry,
                            const ConfusionTable* leave_one_out = nullptr);

}  // namespace ritype
