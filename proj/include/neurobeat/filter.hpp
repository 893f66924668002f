#pragma once

#include <utility>
#include <vector>

#include "neurobeat/types.hpp"

namespace neurobeat {

// One direct-form-II-transposed second-order section, normalized so the
// leading denominator coefficient is 1:
//   y[n] = b0*x[n] + b1*x[n-1] + b2*x[n-2] - a1*y[n-1] - a2*y[n-2]
struct BiquadSection {
  double b0{0.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
};

struct BandDesign {
  double low_hz{0.0};
  double high_hz{0.0};
  int order{0};  // order of each of the high-pass and low-pass halves
  double sample_rate_hz{0.0};
};

struct FilterSpec {
  std::vector<BiquadSection> biquad_sections;
  BandDesign design;
};

// Magnitudes of the two poles of a normalized biquad denominator
// z^2 + a1 z + a2.
std::pair<double, double> biquad_pole_magnitudes(const BiquadSection& s);

// Designs a Butterworth bandpass as a cascade of an order-`order` high-pass
// at low_hz and an order-`order` low-pass at high_hz, each realized as
// order/2 biquads via the bilinear transform with frequency prewarping.
// Throws invalid_band unless 0 < low_hz < high_hz < sample_rate_hz/2 and
// order is even and >= 2; unstable_design if any section's poles leave the
// unit circle.
FilterSpec design_bandpass(double low_hz, double high_hz, int order,
                           double sample_rate_hz);

// Single forward pass of the cascade over one channel, zero initial state.
std::vector<double> filter_channel(const std::vector<double>& x, const FilterSpec& spec);

// Forward-backward (zero-phase) filtering of one channel. The signal is
// reflect-padded by 3x the cascade polynomial order on each side (clamped to
// the signal length) to damp edge transients, then the pad is trimmed.
std::vector<double> zero_phase_channel(const std::vector<double>& x, const FilterSpec& spec);

// Applies zero_phase_channel to every channel of a recording. Shape is
// preserved. Channels are independent; `threads` > 1 filters them
// concurrently.
EegRecording apply_zero_phase(const EegRecording& rec, const FilterSpec& spec,
                              int threads = 1);

}  // namespace neurobeat
