#pragma once

#include <Eigen/Dense>
#include <vector>

#include "neurobeat/types.hpp"

namespace neurobeat {

struct Spectrogram {
  Eigen::MatrixXd magnitudes;  // frames x bins
  double frame_rate_hz{0.0};
  double bin_hz{0.0};
};

// Frame-rate novelty function; values are nonnegative.
struct NoveltyCurve {
  std::vector<double> values;
  double frame_rate_hz{0.0};
};

// Hann-windowed short-time Fourier magnitudes. Frames are complete windows
// only: frame f covers samples [f*hop, f*hop + frame_len); bins =
// frame_len/2 + 1. Throws signal_too_short if the signal holds less than one
// frame, out_of_range on nonsensical frame/hop values.
Spectrogram stft_magnitude(const std::vector<double>& signal, int frame_len, int hop,
                           double sample_rate_hz);

// Half-wave-rectified L1 spectral difference, normalized by bin count:
//   SF(0) = 0;  SF(n) = (1/bins) * sum_k max(0, X(n,k) - X(n-1,k)).
// Throws insufficient_data with fewer than two frames.
NoveltyCurve spectral_flux(const Spectrogram& spec);

}  // namespace neurobeat
