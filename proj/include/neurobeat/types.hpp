#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace neurobeat {

// One subject x song multi-channel recording. `data` is channels x samples,
// stored as f32 to match the on-disk interchange format; numeric pipelines
// promote to f64 internally. `channels`/`samples` mirror the declared header
// shape so validation can detect a header/payload mismatch.
struct EegRecording {
  std::string subject_id;
  std::string song_id;
  double sample_rate_hz{0.0};
  int channels{0};
  long samples{0};
  Eigen::MatrixXf data;  // channels x samples
};

// Ascending onset timestamps in seconds.
struct OnsetAnnotation {
  std::vector<double> times_s;
};

// Per-sample 0/1 onset target vector at the EEG rate.
struct BinaryOnsetSequence {
  double sample_rate_hz{0.0};
  std::vector<uint8_t> bits;
};

// One-second EEG block paired with its per-sample target.
struct WindowPair {
  Eigen::MatrixXd eeg;     // channels x T
  Eigen::VectorXd target;  // length T, entries 0/1
  std::string subject_id;
  std::string song_id;
  int window_index{0};
};

struct SubjectMetadata {
  std::string subject_id;
  int age{0};
  double musical_training_years{0.0};
  double listening_hours_per_week{0.0};
};

// Sigmoid-activated model output, one value per EEG sample.
struct ActivationCurve {
  double sample_rate_hz{125.0};
  std::vector<double> values;  // each in [0, 1]
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

}  // namespace neurobeat
