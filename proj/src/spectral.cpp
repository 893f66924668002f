#include "neurobeat/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "neurobeat/error.hpp"

namespace neurobeat {

Spectrogram stft_magnitude(const std::vector<double>& signal, int frame_len, int hop,
                           double sample_rate_hz) {
  if (frame_len < 2) throw error(errc::out_of_range, "frame_len must be >= 2");
  if (hop < 1 || hop > frame_len) {
    throw error(errc::out_of_range, "hop must lie in [1, frame_len]");
  }
  if (!(sample_rate_hz > 0.0)) throw error(errc::out_of_range, "sample rate must be > 0");
  if (static_cast<long>(signal.size()) < frame_len) {
    std::ostringstream msg;
    msg << "signal holds " << signal.size() << " samples, need at least one frame of "
        << frame_len;
    throw error(errc::signal_too_short, msg.str());
  }

  long frames = (static_cast<long>(signal.size()) - frame_len) / hop + 1;
  int bins = frame_len / 2 + 1;

  // Periodic Hann window, the STFT convention.
  std::vector<double> window(static_cast<size_t>(frame_len));
  for (int n = 0; n < frame_len; ++n) {
    window[static_cast<size_t>(n)] =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / frame_len));
  }

  // Direct DFT per frame; frames are short (32 samples by default), so the
  // quadratic cost is negligible next to model training.
  Eigen::MatrixXd twiddle_re(bins, frame_len), twiddle_im(bins, frame_len);
  for (int k = 0; k < bins; ++k) {
    for (int n = 0; n < frame_len; ++n) {
      double angle = -2.0 * std::numbers::pi * k * n / frame_len;
      twiddle_re(k, n) = std::cos(angle);
      twiddle_im(k, n) = std::sin(angle);
    }
  }

  Spectrogram spec;
  spec.frame_rate_hz = sample_rate_hz / hop;
  spec.bin_hz = sample_rate_hz / frame_len;
  spec.magnitudes.resize(frames, bins);
  Eigen::VectorXd frame(frame_len);
  for (long f = 0; f < frames; ++f) {
    for (int n = 0; n < frame_len; ++n) {
      frame(n) = signal[static_cast<size_t>(f * hop + n)] * window[static_cast<size_t>(n)];
    }
    Eigen::VectorXd re = twiddle_re * frame;
    Eigen::VectorXd im = twiddle_im * frame;
    spec.magnitudes.row(f) = (re.array().square() + im.array().square()).sqrt();
  }
  return spec;
}

NoveltyCurve spectral_flux(const Spectrogram& spec) {
  long frames = spec.magnitudes.rows();
  if (frames < 2) {
    throw error(errc::insufficient_data, "spectral flux needs at least two frames");
  }
  NoveltyCurve curve;
  curve.frame_rate_hz = spec.frame_rate_hz;
  curve.values.assign(static_cast<size_t>(frames), 0.0);
  double bins = static_cast<double>(spec.magnitudes.cols());
  for (long f = 1; f < frames; ++f) {
    curve.values[static_cast<size_t>(f)] =
        (spec.magnitudes.row(f) - spec.magnitudes.row(f - 1)).cwiseMax(0.0).sum() / bins;
  }
  return curve;
}

}  // namespace neurobeat
