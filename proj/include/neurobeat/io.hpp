#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "neurobeat/types.hpp"

namespace neurobeat {

struct SongEntry {
  std::string song_id;
  double duration_s{0.0};
  std::filesystem::path onsets_path;  // resolved against the manifest directory
};

struct RecordingEntry {
  std::string subject_id;
  std::string song_id;
  std::filesystem::path eeg_path;  // resolved against the manifest directory
};

// Dataset index: who listened to what, and where the files live.
struct DatasetManifest {
  int version{1};
  double sample_rate_hz{0.0};
  std::vector<SubjectMetadata> subjects;
  std::vector<SongEntry> songs;
  std::vector<RecordingEntry> recordings;
  std::filesystem::path base_dir;

  const SongEntry& song(const std::string& song_id) const;
  const SubjectMetadata& subject(const std::string& subject_id) const;
};

// Loads and validates a manifest JSON file. Checks the schema, version, and
// referential integrity (every recording must name a declared subject and
// song; no duplicate (subject, song) pairs; at least one subject and song).
DatasetManifest load_manifest(const std::filesystem::path& path);

// Serializes a manifest back to JSON with paths relative to `dir`, and
// writes it to dir/manifest.json. Returns the manifest path.
std::filesystem::path write_manifest(const DatasetManifest& manifest,
                                     const std::filesystem::path& dir);

// EEG interchange format, little-endian:
//   bytes 0-3  magic "EEG1"
//   u32        version = 1
//   u32        channels
//   u64        samples
//   f64        sample_rate_hz
//   f32[channels*samples] channel-major payload (all of channel 0 first)
EegRecording read_eeg_binary(const std::filesystem::path& path);
void write_eeg_binary(const EegRecording& rec, const std::filesystem::path& path);

// Rectangular numeric CSV, one row per channel.
EegRecording read_eeg_csv(const std::filesystem::path& path, double sample_rate_hz);

// Onset text file: one ascending decimal seconds value per line.
OnsetAnnotation read_onsets(const std::filesystem::path& path);
void write_onsets(const OnsetAnnotation& ann, const std::filesystem::path& path);

// Activation curve format, little-endian:
//   magic "ACT1"; u32 version = 1; f64 sample_rate_hz; u64 length; f64 values.
ActivationCurve read_activation(const std::filesystem::path& path);
void write_activation(const ActivationCurve& curve, const std::filesystem::path& path);

}  // namespace neurobeat
