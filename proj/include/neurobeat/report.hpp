#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "neurobeat/eval.hpp"

namespace neurobeat {

// One metrics CSV line: a (method, subject, song) evaluation at one tolerance.
struct MetricsRow {
  std::string method;
  std::string subject;
  std::string song;
  double tolerance_s{0.0};
  Metrics metrics;
};

// Writes `method,subject,song,tolerance_s,precision,recall,f_measure,n_ref,
// n_est,n_tp` with rows sorted by (method, subject, song, tolerance) and
// decimals fixed at six fractional digits, so equal row sets serialize to
// identical bytes regardless of input order.
void write_metrics_csv(std::vector<MetricsRow> rows, const std::filesystem::path& path);

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

// Loss curves per cross-validation fold: `fold,epoch,mean_loss`.
void write_loss_history_csv(const std::vector<std::vector<double>>& per_fold_losses,
                            const std::filesystem::path& path);

// Aggregated distribution of one metric for one method at one tolerance.
struct SummaryRow {
  std::string method;
  std::string metric;
  double tolerance_s{0.0};
  ScoreSummary summary;
};

// `method,metric,tolerance_s,mean,stddev,min,q1,median,q3,max`, sorted by
// (method, metric, tolerance).
void write_summary_csv(std::vector<SummaryRow> rows, const std::filesystem::path& path);

// Standalone SVG with one box glyph per method: interquartile box, median
// line, whiskers at the outermost values within 1.5*IQR of the quartiles,
// outliers as circles. Title = metric_name. Throws empty_group when the map
// or any group is empty.
std::string render_boxplot_svg(const std::map<std::string, std::vector<double>>& groups,
                               const std::string& metric_name);

}  // namespace neurobeat
