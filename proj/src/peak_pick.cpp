#include "neurobeat/peak_pick.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neurobeat/error.hpp"

namespace neurobeat {

namespace {

void check_config(const PeakPickConfig& cfg) {
  if (cfg.w1 < 0 || cfg.w2 < 0 || cfg.w3 < 0 || cfg.w4 < 0 || cfg.w5 < 0) {
    throw error(errc::out_of_range, "peak_pick: window sizes must be non-negative");
  }
  if (!(cfg.delta >= 0.0)) {
    throw error(errc::out_of_range, "peak_pick: delta must be non-negative");
  }
}

}  // namespace

OnsetAnnotation peak_pick(const std::vector<double>& values, double frame_rate_hz,
                          const PeakPickConfig& cfg) {
  check_config(cfg);
  if (values.empty()) {
    throw error(errc::empty_curve, "peak_pick: activation curve is empty");
  }
  if (!(frame_rate_hz > 0.0)) {
    throw error(errc::out_of_range, "peak_pick: frame rate must be positive, got " +
                                        std::to_string(frame_rate_hz));
  }

  const long n = static_cast<long>(values.size());
  OnsetAnnotation out;
  long last = -1;  // frame index of the previous accepted onset
  for (long i = 0; i < n; ++i) {
    if (last >= 0 && i - last < cfg.w5) continue;

    const long max_lo = std::max<long>(0, i - cfg.w1);
    const long max_hi = std::min<long>(n - 1, i + cfg.w2);
    double local_max = values[max_lo];
    for (long k = max_lo + 1; k <= max_hi; ++k) local_max = std::max(local_max, values[k]);
    if (values[i] < local_max) continue;

    const long avg_lo = std::max<long>(0, i - cfg.w3);
    const long avg_hi = std::min<long>(n - 1, i + cfg.w4);
    double sum = 0.0;
    for (long k = avg_lo; k <= avg_hi; ++k) sum += values[k];
    const double local_mean = sum / static_cast<double>(avg_hi - avg_lo + 1);
    if (values[i] < local_mean + cfg.delta) continue;

    out.times_s.push_back(static_cast<double>(i) / frame_rate_hz);
    last = i;
  }
  return out;
}

OnsetAnnotation peak_pick(const ActivationCurve& curve, const PeakPickConfig& cfg) {
  return peak_pick(curve.values, curve.sample_rate_hz, cfg);
}

OnsetAnnotation peak_pick(const NoveltyCurve& curve, const PeakPickConfig& cfg) {
  return peak_pick(curve.values, curve.frame_rate_hz, cfg);
}

OnsetAnnotation dummy_detector(double duration_s) {
  if (!(duration_s > 0.0)) {
    throw error(errc::non_positive_duration,
                "dummy_detector: duration must be positive, got " + std::to_string(duration_s));
  }
  OnsetAnnotation out;
  for (double t = 0.0; t < duration_s; t += 1.0) out.times_s.push_back(t);
  return out;
}

OnsetAnnotation cluster_timestamps(std::vector<double> pooled, double gap_s) {
  if (!(gap_s >= 0.0)) {
    throw error(errc::out_of_range, "cluster_timestamps: gap must be non-negative");
  }
  OnsetAnnotation out;
  if (pooled.empty()) return out;
  std::sort(pooled.begin(), pooled.end());

  double sum = pooled.front();
  long count = 1;
  for (std::size_t i = 1; i < pooled.size(); ++i) {
    if (pooled[i] - pooled[i - 1] > gap_s) {
      out.times_s.push_back(sum / static_cast<double>(count));
      sum = 0.0;
      count = 0;
    }
    sum += pooled[i];
    ++count;
  }
  out.times_s.push_back(sum / static_cast<double>(count));
  return out;
}

OnsetAnnotation flux_baseline(const EegRecording& rec, const StftConfig& stft_cfg,
                              const PeakPickConfig& peak_cfg, double cluster_gap_s) {
  std::vector<double> pooled;
  std::vector<double> channel(static_cast<std::size_t>(rec.data.cols()));
  for (int c = 0; c < rec.data.rows(); ++c) {
    for (long s = 0; s < rec.data.cols(); ++s) {
      channel[static_cast<std::size_t>(s)] = static_cast<double>(rec.data(c, s));
    }
    const Spectrogram spec =
        stft_magnitude(channel, stft_cfg.frame_len, stft_cfg.hop, rec.sample_rate_hz);
    const NoveltyCurve novelty = spectral_flux(spec);
    const OnsetAnnotation onsets = peak_pick(novelty, peak_cfg);
    pooled.insert(pooled.end(), onsets.times_s.begin(), onsets.times_s.end());
  }
  return cluster_timestamps(std::move(pooled), cluster_gap_s);
}

}  // namespace neurobeat
