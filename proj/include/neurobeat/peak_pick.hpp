#pragma once

#include <vector>

#include "neurobeat/spectral.hpp"
#include "neurobeat/types.hpp"

namespace neurobeat {

// Adaptive peak-picking windows, in frames. Defaults are scaled for a
// 125 Hz curve and configurable everywhere.
struct PeakPickConfig {
  int w1{3};   // pre-max
  int w2{3};   // post-max
  int w3{12};  // pre-average
  int w4{6};   // post-average
  int w5{12};  // minimum distance to the previous onset
  double delta{0.1};
};

// Short-time Fourier parameters for the novelty baseline.
struct StftConfig {
  int frame_len{32};
  int hop{4};
};

// Left-to-right scan; index n is an onset iff
//   (a) values[n] = max(values[n-w1 .. n+w2])      (ties keep the leftmost)
//   (b) values[n] >= mean(values[n-w3 .. n+w4]) + delta
//   (c) n - n_last >= w5
// with windows clipped at the boundaries. Timestamps are n / frame_rate_hz.
// Throws empty_curve on an empty curve.
OnsetAnnotation peak_pick(const std::vector<double>& values, double frame_rate_hz,
                          const PeakPickConfig& cfg);
OnsetAnnotation peak_pick(const ActivationCurve& curve, const PeakPickConfig& cfg);
OnsetAnnotation peak_pick(const NoveltyCurve& curve, const PeakPickConfig& cfg);

// The naive reference detector: one onset per second from zero while inside
// the duration. Throws non_positive_duration.
OnsetAnnotation dummy_detector(double duration_s);

// Pools already-sorted-or-not timestamps, starts a new cluster whenever the
// gap between consecutive sorted values exceeds gap_s, and emits each
// cluster's arithmetic mean.
OnsetAnnotation cluster_timestamps(std::vector<double> pooled, double gap_s);

// Signal-side baseline: per channel, spectral flux of the STFT magnitudes is
// peak-picked; the per-channel timestamp lists are pooled and merged by
// cluster_timestamps.
OnsetAnnotation flux_baseline(const EegRecording& rec, const StftConfig& stft_cfg,
                              const PeakPickConfig& peak_cfg, double cluster_gap_s = 0.05);

}  // namespace neurobeat
