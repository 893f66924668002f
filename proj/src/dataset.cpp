#include "neurobeat/dataset.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "neurobeat/error.hpp"
#include "neurobeat/onset_codec.hpp"

namespace neurobeat {

std::vector<SubjectRecordings> to_subject_major(const DatasetManifest& manifest,
                                                std::vector<EegRecording> recordings) {
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (size_t i = 0; i < recordings.size(); ++i) {
    index[{recordings[i].subject_id, recordings[i].song_id}] = i;
  }

  std::vector<SubjectRecordings> out;
  out.reserve(manifest.subjects.size());
  for (const auto& subject : manifest.subjects) {
    SubjectRecordings group;
    group.subject_id = subject.subject_id;
    for (const auto& song : manifest.songs) {
      auto it = index.find({subject.subject_id, song.song_id});
      if (it == index.end()) {
        throw error(errc::missing_cell, "no recording for (" + subject.subject_id + ", " +
                                            song.song_id + ")");
      }
      group.recordings.push_back(std::move(recordings[it->second]));
    }
    out.push_back(std::move(group));
  }
  return out;
}

EegRecording zero_pad(const EegRecording& rec, long target_samples) {
  if (rec.samples > target_samples) {
    std::ostringstream msg;
    msg << "recording has " << rec.samples << " samples, longer than pad target "
        << target_samples;
    throw error(errc::too_long, msg.str());
  }
  if (rec.samples == target_samples) return rec;
  EegRecording out = rec;
  out.samples = target_samples;
  out.data.resize(rec.channels, target_samples);
  out.data.leftCols(rec.samples) = rec.data;
  out.data.rightCols(target_samples - rec.samples).setZero();
  return out;
}

std::vector<WindowPair> segment_windows(const EegRecording& rec,
                                        const BinaryOnsetSequence& targets) {
  long window_len = std::lround(rec.sample_rate_hz);
  if (rec.samples != static_cast<long>(targets.bits.size())) {
    std::ostringstream msg;
    msg << "recording has " << rec.samples << " samples but targets have "
        << targets.bits.size();
    throw error(errc::length_mismatch, msg.str());
  }
  if (window_len <= 0 || rec.samples % window_len != 0) {
    std::ostringstream msg;
    msg << "sample count " << rec.samples << " not divisible by window length " << window_len;
    throw error(errc::length_mismatch, msg.str());
  }

  long n_windows = rec.samples / window_len;
  std::vector<WindowPair> out;
  out.reserve(static_cast<size_t>(n_windows));
  for (long w = 0; w < n_windows; ++w) {
    WindowPair pair;
    pair.eeg = rec.data.middleCols(w * window_len, window_len).cast<double>();
    pair.target.resize(window_len);
    for (long t = 0; t < window_len; ++t) {
      pair.target(t) = targets.bits[static_cast<size_t>(w * window_len + t)];
    }
    pair.subject_id = rec.subject_id;
    pair.song_id = rec.song_id;
    pair.window_index = static_cast<int>(w);
    out.push_back(std::move(pair));
  }
  return out;
}

TrainingSet build_training_set(const DatasetManifest& manifest,
                               const WindowSetOptions& options) {
  std::map<std::string, OnsetAnnotation> song_onsets;
  for (const auto& song : manifest.songs) {
    song_onsets[song.song_id] = read_onsets(song.onsets_path);
  }

  std::vector<EegRecording> recordings;
  recordings.reserve(manifest.recordings.size());
  for (const auto& entry : manifest.recordings) {
    EegRecording rec = read_eeg_binary(entry.eeg_path);
    rec.subject_id = entry.subject_id;
    rec.song_id = entry.song_id;
    recordings.push_back(std::move(rec));
  }

  TrainingSet set;
  for (auto& group : to_subject_major(manifest, std::move(recordings))) {
    set.subject_ids.push_back(group.subject_id);
    for (auto& rec : group.recordings) {
      BinaryOnsetSequence targets =
          timestamps_to_binary(song_onsets[rec.song_id], rec.sample_rate_hz, rec.samples);
      if (options.target_widen_radius > 0) {
        targets = widen_targets(targets, options.target_widen_radius);
      }
      std::vector<WindowPair> windows = segment_windows(rec, targets);
      size_t keep = windows.size();
      if (options.drop_silent_tail) {
        while (keep > 0 && windows[keep - 1].target.maxCoeff() == 0.0) --keep;
      }
      for (size_t w = 0; w < keep; ++w) set.windows.push_back(std::move(windows[w]));
    }
  }
  return set;
}

}  // namespace neurobeat
