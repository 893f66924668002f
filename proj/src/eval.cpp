#include "neurobeat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neurobeat/error.hpp"
#include "neurobeat/rng.hpp"

namespace neurobeat {

namespace {

// One augmenting-path probe of Kuhn's algorithm: can reference onset i be
// matched, possibly by re-routing earlier assignments?
bool try_assign(long i, const std::vector<std::vector<long>>& adj, std::vector<char>& visited,
                std::vector<long>& est_match) {
  for (long j : adj[static_cast<std::size_t>(i)]) {
    if (visited[static_cast<std::size_t>(j)]) continue;
    visited[static_cast<std::size_t>(j)] = 1;
    if (est_match[static_cast<std::size_t>(j)] < 0 ||
        try_assign(est_match[static_cast<std::size_t>(j)], adj, visited, est_match)) {
      est_match[static_cast<std::size_t>(j)] = i;
      return true;
    }
  }
  return false;
}

double quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<std::pair<long, long>> match_onsets(const OnsetAnnotation& ref,
                                                const OnsetAnnotation& est, double tolerance_s) {
  if (!(tolerance_s > 0.0)) {
    throw error(errc::out_of_range,
                "match_onsets: tolerance must be positive, got " + std::to_string(tolerance_s));
  }
  const long n_ref = static_cast<long>(ref.times_s.size());
  const long n_est = static_cast<long>(est.times_s.size());

  std::vector<std::vector<long>> adj(static_cast<std::size_t>(n_ref));
  for (long i = 0; i < n_ref; ++i) {
    for (long j = 0; j < n_est; ++j) {
      if (std::abs(ref.times_s[static_cast<std::size_t>(i)] -
                   est.times_s[static_cast<std::size_t>(j)]) <= tolerance_s) {
        adj[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }

  std::vector<long> est_match(static_cast<std::size_t>(n_est), -1);
  std::vector<char> visited(static_cast<std::size_t>(n_est));
  for (long i = 0; i < n_ref; ++i) {
    std::fill(visited.begin(), visited.end(), 0);
    try_assign(i, adj, visited, est_match);
  }

  std::vector<std::pair<long, long>> pairs;
  for (long j = 0; j < n_est; ++j) {
    if (est_match[static_cast<std::size_t>(j)] >= 0) {
      pairs.emplace_back(est_match[static_cast<std::size_t>(j)], j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

Metrics prf_metrics(long n_tp, long n_ref, long n_est) {
  if (n_tp < 0 || n_ref < 0 || n_est < 0 || n_tp > n_ref || n_tp > n_est) {
    throw error(errc::out_of_range, "prf_metrics: inconsistent counts");
  }
  Metrics m;
  m.n_ref = n_ref;
  m.n_est = n_est;
  m.n_tp = n_tp;
  if (n_ref == 0 || n_est == 0) return m;
  m.precision = static_cast<double>(n_tp) / static_cast<double>(n_est);
  m.recall = static_cast<double>(n_tp) / static_cast<double>(n_ref);
  if (m.precision + m.recall > 0.0) {
    m.f_measure = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

Metrics score_onsets(const OnsetAnnotation& ref, const OnsetAnnotation& est, double tolerance_s) {
  const auto pairs = match_onsets(ref, est, tolerance_s);
  return prf_metrics(static_cast<long>(pairs.size()), static_cast<long>(ref.times_s.size()),
                     static_cast<long>(est.times_s.size()));
}

const std::vector<double>& default_tolerances() {
  static const std::vector<double> tolerances{0.05, 0.1, 0.15, 0.25, 0.5, 0.75, 1.0, 2.0};
  return tolerances;
}

std::vector<SweepRow> tolerance_sweep(const OnsetAnnotation& ref, const OnsetAnnotation& est,
                                      const std::vector<double>& tolerances) {
  if (tolerances.empty()) {
    throw error(errc::empty_input, "tolerance_sweep: no tolerances given");
  }
  std::vector<SweepRow> rows;
  rows.reserve(tolerances.size());
  for (double tol : tolerances) {
    rows.push_back({tol, score_onsets(ref, est, tol)});
  }
  return rows;
}

ScoreSummary aggregate_subjects(const std::vector<double>& values) {
  if (values.empty()) {
    throw error(errc::empty_input, "aggregate_subjects: no scores given");
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  ScoreSummary s;
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  s.min = sorted.front();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw error(errc::length_mismatch, "pearson_r: input lengths differ (" +
                                           std::to_string(x.size()) + " vs " +
                                           std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) {
    throw error(errc::insufficient_data, "pearson_r: need at least 3 points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw error(errc::degenerate_input, "pearson_r: constant input has no defined correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

double permutation_pvalue(const std::vector<double>& x, const std::vector<double>& y, int n_perm,
                          uint64_t seed) {
  if (n_perm <= 0) {
    throw error(errc::out_of_range, "permutation_pvalue: permutation count must be positive");
  }
  const double observed = std::abs(pearson_r(x, y));

  SplitMix64 rng{seed};
  std::vector<double> shuffled = y;
  long hits = 0;
  for (int p = 0; p < n_perm; ++p) {
    // Permutations preserve the multiset, so pearson_r stays well-defined here.
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_below(static_cast<uint64_t>(i + 1)));
      std::swap(shuffled[i], shuffled[j]);
    }
    if (std::abs(pearson_r(x, shuffled)) >= observed) ++hits;
  }
  return static_cast<double>(1 + hits) / static_cast<double>(n_perm + 1);
}

}  // namespace neurobeat
