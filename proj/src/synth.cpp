#include "neurobeat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "neurobeat/error.hpp"
#include "neurobeat/rng.hpp"

namespace neurobeat {

namespace {

constexpr double kKernelFreqHz = 20.0;
constexpr double kKernelDecayS = 0.05;
constexpr double kKernelSupportS = 0.1;

std::vector<double> kernel_taps(SynthKernel kernel, double sample_rate_hz) {
  if (kernel == SynthKernel::delta) return {1.0};
  const long taps = static_cast<long>(std::floor(kKernelSupportS * sample_rate_hz + 1e-9)) + 1;
  std::vector<double> k(static_cast<std::size_t>(taps));
  for (long i = 0; i < taps; ++i) {
    const double tau = static_cast<double>(i) / sample_rate_hz;
    k[static_cast<std::size_t>(i)] =
        std::sin(2.0 * M_PI * kKernelFreqHz * tau) * std::exp(-tau / kKernelDecayS);
  }
  return k;
}

long sample_count(const SynthConfig& cfg) {
  return std::llround(cfg.duration_s * cfg.sample_rate_hz);
}

std::string subject_id_for(int index) {
  const std::string n = std::to_string(index + 1);
  return "s" + std::string(n.size() < 2 ? 2 - n.size() : 0, '0') + n;
}

std::string song_id_for(int index) {
  const std::string n = std::to_string(index + 1);
  return "song" + std::string(n.size() < 2 ? 2 - n.size() : 0, '0') + n;
}

}  // namespace

SynthKernel parse_kernel(const std::string& name) {
  if (name == "damped_sine") return SynthKernel::damped_sine;
  if (name == "delta") return SynthKernel::delta;
  throw error(errc::config, "unknown synth kernel '" + name + "' (damped_sine | delta)");
}

const char* kernel_name(SynthKernel kernel) {
  return kernel == SynthKernel::delta ? "delta" : "damped_sine";
}

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.n_subjects < 1) throw error(errc::config, "synth: need at least one subject");
  if (cfg.n_songs < 1) throw error(errc::config, "synth: need at least one song");
  if (!(cfg.duration_s > 0.0)) throw error(errc::config, "synth: duration must be positive");
  if (cfg.channels < 1) throw error(errc::config, "synth: need at least one channel");
  if (!(cfg.sample_rate_hz > 0.0)) throw error(errc::config, "synth: sample rate must be positive");
  if (!(cfg.bpm > 0.0)) throw error(errc::config, "synth: bpm must be positive");
  if (cfg.onset_jitter_s < 0.0) throw error(errc::config, "synth: jitter must be non-negative");
  if (cfg.onset_jitter_s >= 30.0 / cfg.bpm) {
    throw error(errc::jitter_too_large,
                "synth: jitter " + std::to_string(cfg.onset_jitter_s) +
                    " s reaches half the beat period; onsets could reorder");
  }
  const double exact = cfg.duration_s * cfg.sample_rate_hz;
  if (std::abs(exact - std::llround(exact)) > 1e-9) {
    throw error(errc::config, "synth: duration * sample rate must be a whole sample count, got " +
                                  std::to_string(exact));
  }
}

OnsetAnnotation gen_onset_train(double duration_s, double bpm, double jitter_s, uint64_t seed) {
  if (!(duration_s > 0.0)) {
    throw error(errc::non_positive_duration, "gen_onset_train: duration must be positive");
  }
  if (!(bpm > 0.0)) throw error(errc::config, "gen_onset_train: bpm must be positive");
  if (jitter_s < 0.0) throw error(errc::config, "gen_onset_train: jitter must be non-negative");
  if (jitter_s >= 30.0 / bpm) {
    throw error(errc::jitter_too_large, "gen_onset_train: jitter " + std::to_string(jitter_s) +
                                            " s reaches half the beat period of " +
                                            std::to_string(60.0 / bpm) + " s");
  }

  const double period = 60.0 / bpm;
  SplitMix64 rng{seed};
  OnsetAnnotation ann;
  for (long k = 0; static_cast<double>(k) * period < duration_s; ++k) {
    double t = static_cast<double>(k) * period;
    if (jitter_s > 0.0) t += rng.next_uniform(-jitter_s, jitter_s);
    ann.times_s.push_back(std::clamp(t, 0.0, duration_s));
  }
  return ann;
}

EegRecording gen_eeg(const OnsetAnnotation& ann, const SynthConfig& cfg, uint64_t subject_seed,
                     uint64_t noise_seed) {
  validate_synth_config(cfg);
  const long n = sample_count(cfg);
  const int channels = cfg.channels;

  // Per-subject channel amplitudes live on their own stream so every song of
  // one subject sees the same values.
  SplitMix64 amp_rng{subject_seed};
  Eigen::VectorXd amps(channels);
  for (int c = 0; c < channels; ++c) amps(c) = amp_rng.next_gaussian();

  EegRecording rec;
  rec.sample_rate_hz = cfg.sample_rate_hz;
  rec.channels = channels;
  rec.samples = n;

  SplitMix64 noise_rng{noise_seed};
  Eigen::MatrixXd noise(channels, n);
  for (int c = 0; c < channels; ++c) {
    for (long s = 0; s < n; ++s) noise(c, s) = noise_rng.next_gaussian();
  }

  Eigen::MatrixXd signal = Eigen::MatrixXd::Zero(channels, n);
  if (!ann.times_s.empty()) {
    const std::vector<double> taps = kernel_taps(cfg.kernel, cfg.sample_rate_hz);
    for (double t : ann.times_s) {
      const long start = std::llround(t * cfg.sample_rate_hz);
      for (std::size_t j = 0; j < taps.size(); ++j) {
        const long s = start + static_cast<long>(j);
        if (s < 0 || s >= n) continue;
        for (int c = 0; c < channels; ++c) signal(c, s) += amps(c) * taps[j];
      }
    }
  }

  const double p_signal = signal.squaredNorm() / static_cast<double>(signal.size());
  const double p_noise = noise.squaredNorm() / static_cast<double>(noise.size());
  if (p_signal > 0.0) {
    const double gain = std::sqrt(std::pow(10.0, cfg.snr_db / 10.0) * p_noise / p_signal);
    signal *= gain;
  }
  rec.data = (noise + signal).cast<float>();
  return rec;
}

EegRecording gen_eeg(const OnsetAnnotation& ann, const SynthConfig& cfg, uint64_t subject_seed) {
  return gen_eeg(ann, cfg, subject_seed, mix_seed(subject_seed));
}

std::filesystem::path gen_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  validate_synth_config(cfg);
  namespace fs = std::filesystem;
  for (const char* sub : {"onsets", "eeg"}) {
    std::error_code ec;
    fs::create_directories(out_dir / sub, ec);
    if (ec) {
      throw error(errc::io, "gen_dataset: cannot create output tree under " + out_dir.string() +
                                ": " + ec.message());
    }
  }

  const uint64_t song_space = derive_seed(cfg.seed, 1);
  const uint64_t subject_space = derive_seed(cfg.seed, 2);
  const uint64_t noise_space = derive_seed(cfg.seed, 3);
  const uint64_t meta_space = derive_seed(cfg.seed, 4);

  const long n = sample_count(cfg);
  // Keep written timestamps clear of the final half-sample so index rounding
  // downstream stays inside the recording.
  const double t_max = (static_cast<double>(n) - 0.6) / cfg.sample_rate_hz;

  DatasetManifest manifest;
  manifest.sample_rate_hz = cfg.sample_rate_hz;
  manifest.base_dir = out_dir;

  std::vector<OnsetAnnotation> song_onsets(static_cast<std::size_t>(cfg.n_songs));
  for (int g = 0; g < cfg.n_songs; ++g) {
    OnsetAnnotation ann = gen_onset_train(cfg.duration_s, cfg.bpm, cfg.onset_jitter_s,
                                          derive_seed(song_space, g));
    for (double& t : ann.times_s) t = std::min(t, t_max);
    song_onsets[static_cast<std::size_t>(g)] = ann;

    SongEntry song;
    song.song_id = song_id_for(g);
    song.duration_s = cfg.duration_s;
    song.onsets_path = out_dir / "onsets" / (song.song_id + ".txt");
    write_onsets(ann, song.onsets_path);
    manifest.songs.push_back(song);
  }

  for (int s = 0; s < cfg.n_subjects; ++s) {
    SplitMix64 meta_rng{derive_seed(meta_space, s)};
    SubjectMetadata meta;
    meta.subject_id = subject_id_for(s);
    meta.age = 18 + static_cast<int>(meta_rng.next_below(40));
    meta.musical_training_years = std::floor(meta_rng.next_uniform(0.0, 15.0) * 10.0) / 10.0;
    meta.listening_hours_per_week = std::floor(meta_rng.next_uniform(0.0, 30.0) * 10.0) / 10.0;
    manifest.subjects.push_back(meta);
  }

  for (int s = 0; s < cfg.n_subjects; ++s) {
    const uint64_t subject_seed = derive_seed(subject_space, s);
    for (int g = 0; g < cfg.n_songs; ++g) {
      EegRecording rec = gen_eeg(song_onsets[static_cast<std::size_t>(g)], cfg, subject_seed,
                                 derive_seed(noise_space, s * cfg.n_songs + g));
      rec.subject_id = subject_id_for(s);
      rec.song_id = song_id_for(g);

      RecordingEntry entry;
      entry.subject_id = rec.subject_id;
      entry.song_id = rec.song_id;
      entry.eeg_path = out_dir / "eeg" / (rec.subject_id + "_" + rec.song_id + ".eeg");
      write_eeg_binary(rec, entry.eeg_path);
      manifest.recordings.push_back(entry);
    }
  }

  return write_manifest(manifest, out_dir);
}

}  // namespace neurobeat
