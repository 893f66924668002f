#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "neurobeat/error.hpp"
#include "neurobeat/eval.hpp"
#include "neurobeat/rng.hpp"

using namespace neurobeat;

namespace {

OnsetAnnotation annotation(std::vector<double> times) {
  OnsetAnnotation a;
  a.times_s = std::move(times);
  return a;
}

// Exhaustive maximum-matching oracle over bitmasks of the estimate side;
// tractable for the <= 8x8 instances it is used on.
long brute_force_max_matching(const std::vector<double>& ref, const std::vector<double>& est,
                              double tol) {
  const std::size_t n_est = est.size();
  std::vector<long> memo(ref.size() * (1u << n_est) + (1u << n_est), -1);
  auto rec = [&](auto&& self, std::size_t i, unsigned mask) -> long {
    if (i == ref.size()) return 0;
    long& slot = memo[i * (1u << n_est) + mask];
    if (slot >= 0) return slot;
    long best = self(self, i + 1, mask);  // leave ref[i] unmatched
    for (std::size_t j = 0; j < n_est; ++j) {
      if ((mask >> j) & 1u) continue;
      if (std::abs(ref[i] - est[j]) <= tol) {
        best = std::max(best, 1 + self(self, i + 1, mask | (1u << j)));
      }
    }
    slot = best;
    return best;
  };
  return rec(rec, 0, 0u);
}

OnsetAnnotation random_annotation(SplitMix64& rng, int max_len) {
  OnsetAnnotation a;
  const int len = static_cast<int>(rng.next_below(static_cast<uint64_t>(max_len + 1)));
  for (int i = 0; i < len; ++i) a.times_s.push_back(rng.next_uniform(0.0, 3.0));
  std::sort(a.times_s.begin(), a.times_s.end());
  return a;
}

const std::vector<double> kX{0.81, 0.81, 0.52, 0.29, 0.05, 0.38, 0.41, 0.05, 0.05, 1.0,
                             0.65, 0.23, 0.43, 0.97, 0.9,  0.84, 0.39, 0.49, 0.68, 0.06};
const std::vector<double> kYIndep{0.02, 0.25, 0.86, 0.16, 0.69, 0.25, 0.07, 0.19, 0.68, 0.5,
                                  0.55, 0.45, 0.27, 0.49, 0.92, 0.2,  0.73, 0.25, 0.19, 0.32};

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("match_onsets pairs a single in-window onset") {
    const auto pairs = match_onsets(annotation({1.0}), annotation({1.04}), 0.05);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<long, long>{0, 0});
  }

  TEST_CASE("match_onsets finds cardinality 1 when one estimate fits two references") {
    const auto pairs = match_onsets(annotation({1.0, 1.06}), annotation({1.05}), 0.05);
    CHECK(pairs.size() == 1);
  }

  TEST_CASE("match_onsets drops the out-of-window estimate") {
    const auto pairs = match_onsets(annotation({0.0, 1.0, 2.0}),
                                    annotation({0.04, 0.96, 2.5}), 0.05);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<long, long>{0, 0});
    CHECK(pairs[1] == std::pair<long, long>{1, 1});
  }

  TEST_CASE("match_onsets treats the tolerance as inclusive") {
    // 0.5 and 1.5 are exact in binary, so the distance is exactly the tolerance
    const auto pairs = match_onsets(annotation({1.0}), annotation({1.5}), 0.5);
    CHECK(pairs.size() == 1);
  }

  TEST_CASE("match_onsets re-routes assignments where nearest-first greedy would lose") {
    const auto pairs = match_onsets(annotation({0.0, 1.0}), annotation({0.5, 1.25}), 0.5);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<long, long>{0, 0});
    CHECK(pairs[1] == std::pair<long, long>{1, 1});
  }

  TEST_CASE("match_onsets equals the brute-force maximum on small random instances") {
    SplitMix64 rng{2024};
    for (int instance = 0; instance < 200; ++instance) {
      const OnsetAnnotation ref = random_annotation(rng, 8);
      const OnsetAnnotation est = random_annotation(rng, 8);
      const double tol = instance % 2 == 0 ? 0.1 : 0.35;
      const auto pairs = match_onsets(ref, est, tol);
      const long oracle = brute_force_max_matching(ref.times_s, est.times_s, tol);
      CHECK(static_cast<long>(pairs.size()) == oracle);

      // validity: every pair within tolerance, no index reused
      std::vector<char> ref_used(ref.times_s.size(), 0);
      std::vector<char> est_used(est.times_s.size(), 0);
      for (const auto& [i, j] : pairs) {
        CHECK(std::abs(ref.times_s[static_cast<std::size_t>(i)] -
                       est.times_s[static_cast<std::size_t>(j)]) <= tol);
        CHECK(!ref_used[static_cast<std::size_t>(i)]);
        CHECK(!est_used[static_cast<std::size_t>(j)]);
        ref_used[static_cast<std::size_t>(i)] = 1;
        est_used[static_cast<std::size_t>(j)] = 1;
      }
    }
  }

  TEST_CASE("match_onsets on a dense all-compatible instance saturates the smaller side") {
    const OnsetAnnotation ref = annotation({1.0, 1.01, 1.02, 1.03, 1.04, 1.05, 1.06, 1.07});
    const OnsetAnnotation est = annotation({1.0, 1.01, 1.02, 1.03, 1.04, 1.05});
    const auto pairs = match_onsets(ref, est, 2.0);
    CHECK(pairs.size() == 6);
    CHECK(brute_force_max_matching(ref.times_s, est.times_s, 2.0) == 6);
  }

  TEST_CASE("prf_metrics computes the textbook scores") {
    const Metrics m = prf_metrics(1, 2, 1);
    CHECK(m.precision == doctest::Approx(1.0));
    CHECK(m.recall == doctest::Approx(0.5));
    CHECK(m.f_measure == doctest::Approx(2.0 / 3.0));
    CHECK(m.n_ref == 2);
    CHECK(m.n_est == 1);
    CHECK(m.n_tp == 1);
  }

  TEST_CASE("prf_metrics zeroes all scores when either side is empty") {
    for (const Metrics& m : {prf_metrics(0, 5, 0), prf_metrics(0, 0, 5), prf_metrics(0, 0, 0)}) {
      CHECK(m.precision == 0.0);
      CHECK(m.recall == 0.0);
      CHECK(m.f_measure == 0.0);
    }
    // P + R = 0 with both sides populated
    const Metrics none = prf_metrics(0, 4, 4);
    CHECK(none.f_measure == 0.0);
  }

  TEST_CASE("prf_metrics is perfect when every onset pairs up") {
    const Metrics m = prf_metrics(7, 7, 7);
    CHECK(m.precision == doctest::Approx(1.0));
    CHECK(m.recall == doctest::Approx(1.0));
    CHECK(m.f_measure == doctest::Approx(1.0));
  }

  TEST_CASE("prf_metrics rejects inconsistent counts") {
    try {
      prf_metrics(3, 2, 5);
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::out_of_range);
    }
  }

  TEST_CASE("swapping reference and estimate swaps precision and recall") {
    SplitMix64 rng{77};
    for (int instance = 0; instance < 20; ++instance) {
      const OnsetAnnotation a = random_annotation(rng, 8);
      const OnsetAnnotation b = random_annotation(rng, 8);
      if (a.times_s.empty() || b.times_s.empty()) continue;
      const Metrics ab = score_onsets(a, b, 0.25);
      const Metrics ba = score_onsets(b, a, 0.25);
      CHECK(ab.precision == doctest::Approx(ba.recall));
      CHECK(ab.recall == doctest::Approx(ba.precision));
      CHECK(ab.f_measure == doctest::Approx(ba.f_measure));
      CHECK(ab.n_tp == ba.n_tp);
    }
  }

  TEST_CASE("tolerance_sweep defaults to the eight standard windows") {
    const OnsetAnnotation ref = annotation({0.5, 1.5, 2.5});
    const OnsetAnnotation est = annotation({0.52, 1.8, 4.0});
    const auto rows = tolerance_sweep(ref, est);
    REQUIRE(rows.size() == 8);
    const std::vector<double> expected{0.05, 0.1, 0.15, 0.25, 0.5, 0.75, 1.0, 2.0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].tolerance_s == doctest::Approx(expected[i]));
    }
  }

  TEST_CASE("tolerance_sweep F never decreases as the window widens") {
    SplitMix64 rng{31};
    for (int instance = 0; instance < 25; ++instance) {
      const OnsetAnnotation ref = random_annotation(rng, 8);
      const OnsetAnnotation est = random_annotation(rng, 8);
      const auto rows = tolerance_sweep(ref, est);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].metrics.f_measure >= rows[i - 1].metrics.f_measure - 1e-12);
      }
    }
  }

  TEST_CASE("tolerance_sweep of an annotation against itself is all ones") {
    const OnsetAnnotation ref = annotation({0.5, 1.5, 2.75});
    for (const SweepRow& row : tolerance_sweep(ref, ref)) {
      CHECK(row.metrics.f_measure == doctest::Approx(1.0));
    }
  }

  TEST_CASE("tolerance_sweep rejects an empty tolerance list") {
    try {
      tolerance_sweep(annotation({1.0}), annotation({1.0}), {});
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::empty_input);
    }
  }

  TEST_CASE("aggregate_subjects summarizes constant and two-point inputs") {
    const ScoreSummary flat = aggregate_subjects({0.5, 0.5, 0.5});
    CHECK(flat.mean == doctest::Approx(0.5));
    CHECK(flat.stddev == doctest::Approx(0.0));

    const ScoreSummary pair = aggregate_subjects({0.0, 1.0});
    CHECK(pair.mean == doctest::Approx(0.5));
    CHECK(pair.stddev == doctest::Approx(0.5));  // population convention
  }

  TEST_CASE("aggregate_subjects interpolates quartiles linearly") {
    const ScoreSummary s = aggregate_subjects({0.3, 0.4, 0.5, 0.6});
    CHECK(s.min == doctest::Approx(0.3));
    CHECK(s.q1 == doctest::Approx(0.375));
    CHECK(s.median == doctest::Approx(0.45));
    CHECK(s.q3 == doctest::Approx(0.525));
    CHECK(s.max == doctest::Approx(0.6));
  }

  TEST_CASE("aggregate_subjects handles a single score and rejects none") {
    const ScoreSummary one = aggregate_subjects({0.42});
    CHECK(one.min == doctest::Approx(0.42));
    CHECK(one.q1 == doctest::Approx(0.42));
    CHECK(one.median == doctest::Approx(0.42));
    CHECK(one.q3 == doctest::Approx(0.42));
    CHECK(one.max == doctest::Approx(0.42));
    try {
      aggregate_subjects({});
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::empty_input);
    }
  }

  TEST_CASE("pearson_r reaches the exact bounds on linear data") {
    const std::vector<double> x{0.1, 0.5, 0.7, 1.4};
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(pearson_r(x, x) == doctest::Approx(1.0));
    CHECK(pearson_r(x, neg) == doctest::Approx(-1.0));
  }

  TEST_CASE("pearson_r matches the direct-formula value") {
    // sum(dx*dy)=11, sum(dx^2)=5, sum(dy^2)=26 -> r = 11/sqrt(130)
    const double r = pearson_r({1, 2, 3, 4}, {2, 4, 5, 9});
    CHECK(r == doctest::Approx(0.9647638212377322).epsilon(1e-12));
  }

  TEST_CASE("pearson_r is invariant under positive affine transforms") {
    const double base = pearson_r(kX, kYIndep);
    std::vector<double> scaled;
    for (double v : kX) scaled.push_back(3.5 * v + 11.0);
    CHECK(pearson_r(scaled, kYIndep) == doctest::Approx(base).epsilon(1e-12));
    std::vector<double> negated;
    for (double v : kX) negated.push_back(-2.0 * v);
    CHECK(pearson_r(negated, kYIndep) == doctest::Approx(-base).epsilon(1e-12));
  }

  TEST_CASE("pearson_r rejects degenerate input") {
    try {
      pearson_r({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0});
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::degenerate_input);
    }
    try {
      pearson_r({1.0, 2.0}, {1.0, 2.0});
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::insufficient_data);
    }
    try {
      pearson_r({1.0, 2.0, 3.0}, {1.0, 2.0});
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::length_mismatch);
    }
  }

  TEST_CASE("permutation_pvalue flags a perfect correlation as significant") {
    std::vector<double> x(20);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.05 * static_cast<double>(i + 1);
    const double p = permutation_pvalue(x, x, 10000, 17);
    CHECK(p <= 0.001);
    CHECK(p > 0.0);
  }

  TEST_CASE("permutation_pvalue accepts independence on the fixed-seed instance") {
    // |r| = 0.0037 for this pair; any permutation stream lands far above 0.05
    const double p = permutation_pvalue(kX, kYIndep, 2000, 5);
    CHECK(p > 0.05);
    CHECK(p <= 1.0);
  }

  TEST_CASE("permutation_pvalue is deterministic for a fixed seed") {
    const double a = permutation_pvalue(kX, kYIndep, 500, 42);
    const double b = permutation_pvalue(kX, kYIndep, 500, 42);
    CHECK(a == b);
  }

  TEST_CASE("permutation_pvalue validates its inputs like pearson_r") {
    try {
      permutation_pvalue({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}, 100, 0);
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::degenerate_input);
    }
    try {
      permutation_pvalue(kX, kYIndep, 0, 0);
      FAIL("expected throw");
    } catch (const error& e) {
      CHECK(e.code() == errc::out_of_range);
    }
  }
}
