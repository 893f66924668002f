#include "neurobeat/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "neurobeat/error.hpp"
#include "neurobeat/parallel.hpp"

namespace neurobeat {

namespace {

// Butterworth prototype conjugate-pair damping terms: the order-n analog
// prototype factors into s^2 + c_k s + 1 with c_k = 2 cos(pi (2k+1) / (2n)).
std::vector<double> prototype_damping(int order) {
  std::vector<double> c;
  for (int k = 0; k < order / 2; ++k) {
    c.push_back(2.0 * std::cos(std::numbers::pi * (2 * k + 1) / (2.0 * order)));
  }
  return c;
}

// Bilinear transform of one prototype factor at prewarped cutoff fc.
// K = cot(pi fc / fs); low-pass maps 1/(s^2+cs+1), high-pass s^2/(s^2+cs+1).
BiquadSection bilinear_section(double c, double fc, double fs, bool highpass) {
  double k = 1.0 / std::tan(std::numbers::pi * fc / fs);
  double k2 = k * k;
  double norm = k2 + c * k + 1.0;
  BiquadSection s;
  if (highpass) {
    s.b0 = k2 / norm;
    s.b1 = -2.0 * k2 / norm;
    s.b2 = k2 / norm;
  } else {
    s.b0 = 1.0 / norm;
    s.b1 = 2.0 / norm;
    s.b2 = 1.0 / norm;
  }
  s.a1 = 2.0 * (1.0 - k2) / norm;
  s.a2 = (k2 - c * k + 1.0) / norm;
  return s;
}

}  // namespace

std::pair<double, double> biquad_pole_magnitudes(const BiquadSection& s) {
  double disc = s.a1 * s.a1 - 4.0 * s.a2;
  if (disc < 0.0) {
    double mag = std::sqrt(s.a2);  // conjugate pair, |p|^2 = a2
    return {mag, mag};
  }
  double root = std::sqrt(disc);
  return {std::abs((-s.a1 - root) / 2.0), std::abs((-s.a1 + root) / 2.0)};
}

FilterSpec design_bandpass(double low_hz, double high_hz, int order,
                           double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) ||
      !(high_hz < sample_rate_hz / 2.0)) {
    std::ostringstream msg;
    msg << "band [" << low_hz << ", " << high_hz << "] Hz is invalid at sample rate "
        << sample_rate_hz << " Hz (need 0 < low < high < Nyquist)";
    throw error(errc::invalid_band, msg.str());
  }
  if (order < 2 || order % 2 != 0) {
    std::ostringstream msg;
    msg << "filter order must be even and >= 2, got " << order;
    throw error(errc::invalid_band, msg.str());
  }

  FilterSpec spec;
  spec.design = {low_hz, high_hz, order, sample_rate_hz};
  for (double c : prototype_damping(order)) {
    spec.biquad_sections.push_back(bilinear_section(c, low_hz, sample_rate_hz, true));
  }
  for (double c : prototype_damping(order)) {
    spec.biquad_sections.push_back(bilinear_section(c, high_hz, sample_rate_hz, false));
  }

  for (const auto& s : spec.biquad_sections) {
    auto [p1, p2] = biquad_pole_magnitudes(s);
    bool finite = std::isfinite(s.b0) && std::isfinite(s.b1) && std::isfinite(s.b2) &&
                  std::isfinite(s.a1) && std::isfinite(s.a2);
    if (!finite || p1 >= 1.0 || p2 >= 1.0) {
      std::ostringstream msg;
      msg << "designed section is unstable (pole magnitudes " << p1 << ", " << p2 << ")";
      throw error(errc::unstable_design, msg.str());
    }
  }
  return spec;
}

std::vector<double> filter_channel(const std::vector<double>& x, const FilterSpec& spec) {
  std::vector<double> y = x;
  for (const auto& s : spec.biquad_sections) {
    double w1 = 0.0, w2 = 0.0;  // direct form II transposed state
    for (double& v : y) {
      double in = v;
      double out = s.b0 * in + w1;
      w1 = s.b1 * in - s.a1 * out + w2;
      w2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> zero_phase_channel(const std::vector<double>& x, const FilterSpec& spec) {
  if (x.empty()) return {};
  long n = static_cast<long>(x.size());
  // 3x the cascade polynomial order (each biquad contributes order 2),
  // mirrored about each edge without repeating the edge sample.
  long pad = std::min<long>(6L * static_cast<long>(spec.biquad_sections.size()), n - 1);

  std::vector<double> extended;
  extended.reserve(static_cast<size_t>(n + 2 * pad));
  for (long i = pad; i >= 1; --i) extended.push_back(x[static_cast<size_t>(i)]);
  extended.insert(extended.end(), x.begin(), x.end());
  for (long i = n - 2; i >= n - 1 - pad; --i) extended.push_back(x[static_cast<size_t>(i)]);

  std::vector<double> forward = filter_channel(extended, spec);
  std::reverse(forward.begin(), forward.end());
  std::vector<double> backward = filter_channel(forward, spec);
  std::reverse(backward.begin(), backward.end());

  return {backward.begin() + pad, backward.begin() + pad + n};
}

EegRecording apply_zero_phase(const EegRecording& rec, const FilterSpec& spec, int threads) {
  EegRecording out = rec;
  parallel_for(rec.channels, threads, [&](long c) {
    std::vector<double> channel(static_cast<size_t>(rec.samples));
    for (long i = 0; i < rec.samples; ++i) channel[static_cast<size_t>(i)] = rec.data(c, i);
    std::vector<double> filtered = zero_phase_channel(channel, spec);
    for (long i = 0; i < rec.samples; ++i)
      out.data(c, i) = static_cast<float>(filtered[static_cast<size_t>(i)]);
  });
  return out;
}

}  // namespace neurobeat
