#pragma once

#include <string>
#include <vector>

#include "neurobeat/io.hpp"
#include "neurobeat/types.hpp"

namespace neurobeat {

struct SubjectRecordings {
  std::string subject_id;
  std::vector<EegRecording> recordings;  // in manifest song order
};

// Regroups a song-major pile of recordings into subject-major order: one
// group per manifest subject, holding that subject's recording for every
// manifest song, in song order. Throws missing_cell if any (subject, song)
// recording is absent.
std::vector<SubjectRecordings> to_subject_major(const DatasetManifest& manifest,
                                                std::vector<EegRecording> recordings);

// Appends trailing zeros per channel until the recording holds
// `target_samples` samples. Throws too_long if it already holds more.
EegRecording zero_pad(const EegRecording& rec, long target_samples = 37500);

// Cuts a recording and its per-sample targets into consecutive
// non-overlapping one-second blocks. Pair i covers samples [i*T, (i+1)*T)
// with T = round(sample_rate_hz). Throws length_mismatch if recording and
// target lengths differ or are not divisible by T.
std::vector<WindowPair> segment_windows(const EegRecording& rec,
                                        const BinaryOnsetSequence& targets);

struct WindowSetOptions {
  int target_widen_radius{0};
  // When set, trailing windows whose targets are all zero are dropped per
  // recording (padding tail suppression).
  bool drop_silent_tail{false};
};

struct TrainingSet {
  std::vector<WindowPair> windows;
  std::vector<std::string> subject_ids;  // manifest order
};

// Loads every recording named by the manifest, regroups subject-major,
// binarizes each song's onsets at the recording length, and segments into
// window pairs. Recordings are expected to be preprocessed (filtered,
// padded to a whole number of seconds).
TrainingSet build_training_set(const DatasetManifest& manifest,
                               const WindowSetOptions& options = {});

}  // namespace neurobeat
