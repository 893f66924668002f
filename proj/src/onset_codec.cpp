#include "neurobeat/onset_codec.hpp"

#include <cmath>
#include <sstream>

#include "neurobeat/error.hpp"

namespace neurobeat {

void require_valid_annotation(const OnsetAnnotation& ann) {
  double prev = -1.0;
  for (size_t i = 0; i < ann.times_s.size(); ++i) {
    double t = ann.times_s[i];
    if (!std::isfinite(t) || t < 0.0) {
      std::ostringstream msg;
      msg << "annotation entry " << i << " is " << t << "; timestamps must be finite and >= 0";
      throw error(errc::invalid_annotation, msg.str());
    }
    if (i > 0 && t <= prev) {
      std::ostringstream msg;
      msg << "annotation not strictly ascending at entry " << i << " (" << prev << " -> " << t << ")";
      throw error(errc::invalid_annotation, msg.str());
    }
    prev = t;
  }
}

BinaryOnsetSequence timestamps_to_binary(const OnsetAnnotation& ann,
                                         double sample_rate_hz, long length) {
  if (length <= 0) throw error(errc::out_of_range, "sequence length must be > 0");
  if (!(sample_rate_hz > 0.0)) {
    throw error(errc::invalid_annotation, "sample rate must be > 0");
  }
  require_valid_annotation(ann);

  BinaryOnsetSequence seq;
  seq.sample_rate_hz = sample_rate_hz;
  seq.bits.assign(static_cast<size_t>(length), 0);
  for (double t : ann.times_s) {
    double idx = std::floor(t * sample_rate_hz + 0.5);
    if (idx >= static_cast<double>(length)) {
      std::ostringstream msg;
      msg << "onset at " << t << " s maps to index " << idx << " >= length " << length;
      throw error(errc::out_of_range, msg.str());
    }
    seq.bits[static_cast<size_t>(idx)] = 1;
  }
  return seq;
}

OnsetAnnotation binary_to_timestamps(const BinaryOnsetSequence& seq) {
  OnsetAnnotation ann;
  for (size_t i = 0; i < seq.bits.size(); ++i) {
    if (seq.bits[i]) ann.times_s.push_back(static_cast<double>(i) / seq.sample_rate_hz);
  }
  return ann;
}

BinaryOnsetSequence widen_targets(const BinaryOnsetSequence& seq, int radius) {
  if (radius < 0) throw error(errc::out_of_range, "widen radius must be >= 0");
  if (radius == 0) return seq;
  BinaryOnsetSequence out;
  out.sample_rate_hz = seq.sample_rate_hz;
  long n = static_cast<long>(seq.bits.size());
  out.bits.assign(seq.bits.size(), 0);
  for (long i = 0; i < n; ++i) {
    if (!seq.bits[static_cast<size_t>(i)]) continue;
    long lo = std::max(0L, i - radius);
    long hi = std::min(n - 1, i + radius);
    for (long j = lo; j <= hi; ++j) out.bits[static_cast<size_t>(j)] = 1;
  }
  return out;
}

ValidationReport validate_recording(const EegRecording& rec) {
  ValidationReport report;
  if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz)) {
    report.violations.push_back("sample_rate_hz must be finite and > 0");
  }
  if (rec.channels <= 0) report.violations.push_back("channels must be > 0");
  if (rec.samples <= 0) report.violations.push_back("samples must be > 0");
  if (rec.data.rows() != rec.channels || rec.data.cols() != rec.samples) {
    std::ostringstream msg;
    msg << "shape mismatch: declared " << rec.channels << "x" << rec.samples
        << " but data is " << rec.data.rows() << "x" << rec.data.cols();
    report.violations.push_back(msg.str());
  }
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    for (Eigen::Index i = 0; i < rec.data.cols(); ++i) {
      if (!std::isfinite(rec.data(c, i))) {
        std::ostringstream msg;
        msg << "non-finite value at (" << c << "," << i << ")";
        report.violations.push_back(msg.str());
        return report;  // first non-finite is enough to locate the problem
      }
    }
  }
  return report;
}

}  // namespace neurobeat
