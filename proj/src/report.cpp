#include "ritype/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ritype/common.hpp"
#include "ritype/stats.hpp"

namespace ritype {

std::string format_fixed(double x, int digits) {
  double r = round_half_up(x, digits);
  if (r == 0.0) r = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, r);
  return buf;
}

std::string format_percent(double fraction) { return format_fixed(100.0 * fraction, 2) + "%"; }

namespace {

std::string format_df2(double df2) {
  double nearest = std::round(df2);
  if (std::fabs(df2 - nearest) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", nearest);
    return buf;
  }
  return format_fixed(df2, 2);
}

std::string indicator_label(const IndicatorRegistry& registry, const std::string& column) {
  if (column.rfind("ind_", 0) == 0) {
    int number = 0;
    try {
      number = std::stoi(column.substr(4));
    } catch (...) {
      return column;
    }
    for (const auto& entry : registry.entries)
      if (entry.number == number) return entry.label;
  }
  return column;
}

}  // namespace

std::string significance_line(const SignificanceTest& t) {
  return "F(" + std::to_string(t.df1) + "," + format_df2(t.df2) + ") = " + format_fixed(t.f, 2) +
         ", p = " + format_fixed(t.p_value, 4);
}

std::vector<SummaryRow> build_summary(const RatingCountTable& counts,
                                      const IndicatorRegistry& registry) {
  std::vector<SummaryRow> rows;
  for (std::size_t j = 0; j < counts.indicator_numbers.size(); ++j) {
    SummaryRow row;
    row.indicator_number = counts.indicator_numbers[j];
    row.label = indicator_label(registry, "ind_" + std::to_string(row.indicator_number));
    row.counts = counts.counts[j];
    std::vector<double> values;
    for (std::size_t l = 0; l < 7; ++l)
      values.insert(values.end(), static_cast<std::size_t>(row.counts[l]), kRatingLevels[l]);
    IndicatorSummary s = summarize(values);
    row.median = s.median;
    row.mean = s.mean;
    row.sd = s.sd;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string markdown_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "# Indicator rating distributions\n\n";
  out << "| # | Indicator | 1.0 | 1.5 | 2.0 | 2.5 | 3.0 | 3.5 | 4.0 | Median | Mean | SD |\n";
  out << "| ---: | --- | ---: | ---: | ---: | ---: | ---: | ---: | ---: | ---: | ---: | ---: |\n";
  for (const auto& row : rows) {
    out << "| " << row.indicator_number << " | " << row.label;
    for (long long c : row.counts) out << " | " << c;
    out << " | " << format_fixed(row.median, 1) << " | " << format_fixed(row.mean, 1) << " | "
        << format_fixed(row.sd, 1) << " |\n";
  }
  return out.str();
}

csv::Table csv_summary(const std::vector<SummaryRow>& rows) {
  csv::Table t;
  t.header = {"indicator", "label", "n_1", "n_1_5", "n_2", "n_2_5",
              "n_3",       "n_3_5", "n_4", "median", "mean", "sd"};
  for (const auto& row : rows) {
    std::vector<std::string> fields;
    fields.push_back(std::to_string(row.indicator_number));
    fields.push_back(row.label);
    for (long long c : row.counts) fields.push_back(std::to_string(c));
    fields.push_back(format_fixed(row.median, 1));
    fields.push_back(format_fixed(row.mean, 1));
    fields.push_back(format_fixed(row.sd, 1));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

namespace {

void write_confusion(std::ostream& out, const ConfusionTable& table) {
  out << "| Reference \\ Predicted |";
  for (int label : table.labels) out << " " << label << " |";
  out << " Total |\n|---|";
  for (std::size_t i = 0; i < table.labels.size(); ++i) out << "---:|";
  out << "---:|\n";
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    long long row_total = 0;
    out << "| " << table.labels[i] << " |";
    for (long long c : table.counts[i]) {
      out << " " << c << " |";
      row_total += c;
    }
    out << " " << row_total << " |\n";
  }
  out << "\nAccuracy: " << format_percent(table.accuracy) << "\n";
}

}  // namespace

std::string markdown_report(const DiscriminantModel& m, const ConfusionTable& resubstitution,
                            const IndicatorRegistry& registry,
                            const ConfusionTable* leave_one_out) {
  std::ostringstream out;
  out << "# Discriminant analysis report\n\n";
  out << "- Observations: " << m.n << "\n";
  out << "- Clusters: " << m.k << "\n";
  out << "- Predictors: " << m.p << "\n";
  out << "- Retained discriminants: " << m.r << "\n";
  out << "- Priors: " << to_string(m.priors) << "\n\n";

  out << "## Significance\n\n";
  if (!m.significance.empty()) {
    const auto& overall = m.significance.front();
    out << "Wilks' lambda = " << format_fixed(overall.wilks_lambda, 4) << ", "
        << significance_line(overall) << "\n\n";
  }
  out << "| Dimensions | Wilks' lambda | F | df1 | df2 | p |\n";
  out << "| --- | ---: | ---: | ---: | ---: | ---: |\n";
  for (const auto& t : m.significance) {
    out << "| " << t.start_dim << ".." << m.r << " | " << format_fixed(t.wilks_lambda, 4) << " | "
        << format_fixed(t.f, 2) << " | " << t.df1 << " | " << format_df2(t.df2) << " | "
        << format_fixed(t.p_value, 4) << " |\n";
  }
  out << "\n";

  std::size_t r = static_cast<std::size_t>(m.r);
  if (r == 0) {
    out << "No discriminant dimensions were retained; the clusters are "
           "indistinguishable on these predictors.\n";
    out << "\n## Classification\n\n";
    write_confusion(out, resubstitution);
    if (m.regularization_applied || !m.warnings.empty()) {
      out << "\n## Notes\n\n";
      for (const auto& entry : m.regularization_log) out << "- " << entry << "\n";
      for (const auto& w : m.warnings) out << "- " << w << "\n";
    }
    return out.str();
  }
  out << "## Structural loadings\n\n";
  out << "| Predictor |";
  for (std::size_t d = 1; d <= r; ++d) out << " D" << d << " |";
  out << "\n| --- |";
  for (std::size_t d = 0; d < r; ++d) out << " ---: |";
  out << "\n";
  for (std::size_t j = 0; j < m.predictor_labels.size(); ++j) {
    out << "| " << indicator_label(registry, m.predictor_labels[j]) << " |";
    for (std::size_t d = 0; d < r; ++d) out << " " << format_fixed(m.structural_loadings(j, d), 2) << " |";
    out << "\n";
  }
  out << "\n";

  out << "## Cluster centroids\n\n";
  out << "| Cluster | Size |";
  for (std::size_t d = 1; d <= r; ++d) out << " D" << d << " |";
  out << "\n| --- | ---: |";
  for (std::size_t d = 0; d < r; ++d) out << " ---: |";
  out << "\n";
  for (std::size_t g = 0; g < static_cast<std::size_t>(m.k); ++g) {
    out << "| " << m.group_labels[g] << " | " << m.group_sizes[g] << " |";
    for (std::size_t d = 0; d < r; ++d) out << " " << format_fixed(m.centroids(g, d), 2) << " |";
    out << "\n";
  }
  out << "\n";

  out << "## Classification\n\n";
  write_confusion(out, resubstitution);
  if (leave_one_out) {
    out << "\n## Leave-one-out cross-validation\n\n";
    out << "Each row is classified by a model fitted without it; this is not the "
           "resubstitution figure above.\n\n";
    write_confusion(out, *leave_one_out);
  }

  if (m.regularization_applied || !m.warnings.empty()) {
    out << "\n## Notes\n\n";
    if (m.regularization_applied)
      out << "- Ridge regularization applied to the within-group scatter: " << m.regularization
          << "\n";
    for (const auto& entry : m.regularization_log) out << "- " << entry << "\n";
    for (const auto& w : m.warnings) out << "- " << w << "\n";
  }
  return out.str();
}

}  // namespace ritype
