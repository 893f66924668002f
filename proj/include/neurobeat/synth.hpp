#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "neurobeat/io.hpp"
#include "neurobeat/types.hpp"

namespace neurobeat {

enum class SynthKernel { damped_sine, delta };

SynthKernel parse_kernel(const std::string& name);
const char* kernel_name(SynthKernel kernel);

// Everything the generator needs to fabricate a dataset: onset-locked evoked
// responses (a damped 20 Hz sinusoid or a bare delta) buried in unit-variance
// Gaussian noise at a calibrated SNR.
struct SynthConfig {
  int n_subjects{0};
  int n_songs{0};
  double duration_s{0.0};
  int channels{125};
  double sample_rate_hz{125.0};
  double bpm{0.0};
  double onset_jitter_s{0.0};
  double snr_db{0.0};
  SynthKernel kernel{SynthKernel::damped_sine};
  uint64_t seed{0};
};

// Throws config / jitter_too_large on invalid values. duration_s *
// sample_rate_hz must be a whole sample count.
void validate_synth_config(const SynthConfig& cfg);

// Beat grid k * 60/bpm for k >= 0 inside [0, duration), each point moved by
// uniform jitter in [-jitter_s, +jitter_s] and clamped into the duration.
// jitter_s < 30/bpm keeps the output strictly ascending. Deterministic in
// seed. Throws jitter_too_large.
OnsetAnnotation gen_onset_train(double duration_s, double bpm, double jitter_s, uint64_t seed);

// One synthetic recording: per-channel Gaussian noise plus kernel instances
// time-locked to each onset. Channel amplitudes are drawn once per subject
// (from subject_seed, so a subject's songs share them); the noise stream is
// separate so distinct recordings get independent noise. The kernel gain is
// calibrated against the measured signal and noise powers, making the
// realized power ratio hit snr_db exactly for any non-empty annotation.
EegRecording gen_eeg(const OnsetAnnotation& ann, const SynthConfig& cfg, uint64_t subject_seed,
                     uint64_t noise_seed);
EegRecording gen_eeg(const OnsetAnnotation& ann, const SynthConfig& cfg, uint64_t subject_seed);

// Writes manifest.json, onsets/<song>.txt, and eeg/<subject>_<song>.eeg under
// out_dir; subjects share each song's annotation. Subject metadata is
// fabricated deterministically from cfg.seed. Returns the manifest path.
std::filesystem::path gen_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace neurobeat
