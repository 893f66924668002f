#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "neurobeat/types.hpp"

namespace neurobeat {

// Counts plus the derived precision/recall/F for one (reference, estimate)
// pair at one tolerance.
struct Metrics {
  double precision{0.0};
  double recall{0.0};
  double f_measure{0.0};
  long n_ref{0};
  long n_est{0};
  long n_tp{0};
};

struct SweepRow {
  double tolerance_s{0.0};
  Metrics metrics;
};

// Mean, population standard deviation, and the five-number summary of a
// per-subject score distribution. Quartiles use linear interpolation between
// order statistics.
struct ScoreSummary {
  double mean{0.0};
  double stddev{0.0};
  double min{0.0};
  double q1{0.0};
  double median{0.0};
  double q3{0.0};
  double max{0.0};
};

// Maximum-cardinality one-to-one matching between reference and estimated
// onsets, where (i, j) is matchable iff |ref[i] - est[j]| <= tolerance_s
// (inclusive). Returns the matched index pairs. Throws out_of_range on a
// non-positive tolerance.
std::vector<std::pair<long, long>> match_onsets(const OnsetAnnotation& ref,
                                                const OnsetAnnotation& est, double tolerance_s);

// P = TP/n_est, R = TP/n_ref, F = 2PR/(P+R); an empty reference or estimate
// list yields all-zero scores, as does P + R = 0.
Metrics prf_metrics(long n_tp, long n_ref, long n_est);

// match_onsets + prf_metrics in one call.
Metrics score_onsets(const OnsetAnnotation& ref, const OnsetAnnotation& est, double tolerance_s);

// {0.05, 0.1, 0.15, 0.25, 0.5, 0.75, 1.0, 2.0} seconds.
const std::vector<double>& default_tolerances();

// One row per tolerance, ascending. F is non-decreasing in the tolerance.
std::vector<SweepRow> tolerance_sweep(const OnsetAnnotation& ref, const OnsetAnnotation& est,
                                      const std::vector<double>& tolerances = default_tolerances());

// Throws empty_input on an empty vector.
ScoreSummary aggregate_subjects(const std::vector<double>& values);

// Sample Pearson correlation. Requires equal lengths, at least three points,
// and both inputs non-constant (degenerate_input / length_mismatch /
// insufficient_data otherwise).
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// Two-tailed permutation test on |pearson_r|:
//   p = (1 + #{pi : |r(x, pi(y))| >= |r(x, y)|}) / (n_perm + 1)
// with seeded, reproducible shuffles of y.
double permutation_pvalue(const std::vector<double>& x, const std::vector<double>& y,
                          int n_perm = 10000, uint64_t seed = 0);

}  // namespace neurobeat
