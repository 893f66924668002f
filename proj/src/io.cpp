#include "neurobeat/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "neurobeat/error.hpp"
#include "neurobeat/onset_codec.hpp"

namespace neurobeat {

namespace {

using nlohmann::json;

void write_raw(std::ofstream& out, const void* data, size_t bytes) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

template <typename T>
void write_le(std::ofstream& out, T value) {
  write_raw(out, &value, sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, const std::filesystem::path& path, const char* field) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw error(errc::truncated_file,
                path.string() + ": truncated while reading " + field);
  }
  return value;
}

json require_key(const json& j, const char* key, const std::filesystem::path& path) {
  if (!j.contains(key)) {
    throw error(errc::parse, path.string() + ": missing manifest key \"" + key + "\"");
  }
  return j.at(key);
}

}  // namespace

const SongEntry& DatasetManifest::song(const std::string& song_id) const {
  for (const auto& s : songs) {
    if (s.song_id == song_id) return s;
  }
  throw error(errc::integrity, "unknown song id: " + song_id);
}

const SubjectMetadata& DatasetManifest::subject(const std::string& subject_id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == subject_id) return s;
  }
  throw error(errc::integrity, "unknown subject id: " + subject_id);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open manifest: " + path.string());

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw error(errc::parse, path.string() + ": " + e.what());
  }

  DatasetManifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  try {
    m.version = require_key(j, "version", path).get<int>();
    if (m.version != 1) {
      throw error(errc::version, path.string() + ": unsupported manifest version " +
                                     std::to_string(m.version));
    }
    m.sample_rate_hz = require_key(j, "sample_rate_hz", path).get<double>();
    for (const auto& js : require_key(j, "subjects", path)) {
      SubjectMetadata s;
      s.subject_id = js.at("id").get<std::string>();
      s.age = js.at("age").get<int>();
      s.musical_training_years = js.at("musical_training_years").get<double>();
      s.listening_hours_per_week = js.at("listening_hours_per_week").get<double>();
      m.subjects.push_back(std::move(s));
    }
    for (const auto& js : require_key(j, "songs", path)) {
      SongEntry s;
      s.song_id = js.at("id").get<std::string>();
      s.duration_s = js.at("duration_s").get<double>();
      s.onsets_path = m.base_dir / js.at("onsets_path").get<std::string>();
      m.songs.push_back(std::move(s));
    }
    for (const auto& jr : require_key(j, "recordings", path)) {
      RecordingEntry r;
      r.subject_id = jr.at("subject_id").get<std::string>();
      r.song_id = jr.at("song_id").get<std::string>();
      r.eeg_path = m.base_dir / jr.at("eeg_path").get<std::string>();
      m.recordings.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw error(errc::parse, path.string() + ": " + e.what());
  }

  if (!(m.sample_rate_hz > 0.0)) {
    throw error(errc::integrity, path.string() + ": sample_rate_hz must be > 0");
  }
  if (m.subjects.empty()) {
    throw error(errc::integrity, path.string() + ": at least one subject required");
  }
  if (m.songs.empty()) {
    throw error(errc::integrity, path.string() + ": at least one song required");
  }

  std::set<std::string> subject_ids, song_ids;
  for (const auto& s : m.subjects) {
    if (!subject_ids.insert(s.subject_id).second) {
      throw error(errc::integrity, path.string() + ": duplicate subject id " + s.subject_id);
    }
  }
  for (const auto& s : m.songs) {
    if (!song_ids.insert(s.song_id).second) {
      throw error(errc::integrity, path.string() + ": duplicate song id " + s.song_id);
    }
  }
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto& r : m.recordings) {
    if (!subject_ids.count(r.subject_id)) {
      throw error(errc::integrity,
                  path.string() + ": recording references unknown subject " + r.subject_id);
    }
    if (!song_ids.count(r.song_id)) {
      throw error(errc::integrity,
                  path.string() + ": recording references unknown song " + r.song_id);
    }
    if (!cells.insert({r.subject_id, r.song_id}).second) {
      throw error(errc::integrity, path.string() + ": duplicate recording for (" +
                                       r.subject_id + ", " + r.song_id + ")");
    }
  }
  return m;
}

std::filesystem::path write_manifest(const DatasetManifest& manifest,
                                     const std::filesystem::path& dir) {
  json j;
  j["version"] = manifest.version;
  j["sample_rate_hz"] = manifest.sample_rate_hz;
  j["subjects"] = json::array();
  for (const auto& s : manifest.subjects) {
    j["subjects"].push_back({{"id", s.subject_id},
                             {"age", s.age},
                             {"musical_training_years", s.musical_training_years},
                             {"listening_hours_per_week", s.listening_hours_per_week}});
  }
  j["songs"] = json::array();
  for (const auto& s : manifest.songs) {
    j["songs"].push_back({{"id", s.song_id},
                          {"duration_s", s.duration_s},
                          {"onsets_path", s.onsets_path.lexically_relative(dir).generic_string()}});
  }
  j["recordings"] = json::array();
  for (const auto& r : manifest.recordings) {
    j["recordings"].push_back({{"subject_id", r.subject_id},
                               {"song_id", r.song_id},
                               {"eeg_path", r.eeg_path.lexically_relative(dir).generic_string()}});
  }
  std::filesystem::path out_path = dir / "manifest.json";
  std::ofstream out(out_path);
  if (!out) throw error(errc::io, "cannot write manifest: " + out_path.string());
  out << j.dump(2) << "\n";
  return out_path;
}

EegRecording read_eeg_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io, "cannot open EEG file: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EEG1", 4) != 0) {
    throw error(errc::bad_magic, path.string() + ": not an EEG1 file");
  }
  uint32_t version = read_le<uint32_t>(in, path, "version");
  if (version != 1) {
    throw error(errc::version, path.string() + ": unsupported EEG version " +
                                   std::to_string(version));
  }
  uint32_t channels = read_le<uint32_t>(in, path, "channels");
  uint64_t samples = read_le<uint64_t>(in, path, "samples");
  double sample_rate = read_le<double>(in, path, "sample_rate_hz");
  if (channels == 0 || samples == 0) {
    throw error(errc::shape_mismatch, path.string() + ": zero channels or samples");
  }

  EegRecording rec;
  rec.sample_rate_hz = sample_rate;
  rec.channels = static_cast<int>(channels);
  rec.samples = static_cast<long>(samples);
  rec.data.resize(rec.channels, rec.samples);
  // Channel-major payload: one contiguous run of samples per channel.
  std::vector<float> row(static_cast<size_t>(samples));
  for (uint32_t c = 0; c < channels; ++c) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(samples * sizeof(float)));
    if (!in) {
      throw error(errc::truncated_file,
                  path.string() + ": payload ends inside channel " + std::to_string(c));
    }
    for (uint64_t i = 0; i < samples; ++i) {
      rec.data(static_cast<int>(c), static_cast<long>(i)) = row[i];
    }
  }
  return rec;
}

void write_eeg_binary(const EegRecording& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io, "cannot write EEG file: " + path.string());
  out.write("EEG1", 4);
  write_le<uint32_t>(out, 1);
  write_le<uint32_t>(out, static_cast<uint32_t>(rec.channels));
  write_le<uint64_t>(out, static_cast<uint64_t>(rec.samples));
  write_le<double>(out, rec.sample_rate_hz);
  std::vector<float> row(static_cast<size_t>(rec.samples));
  for (int c = 0; c < rec.channels; ++c) {
    for (long i = 0; i < rec.samples; ++i) row[static_cast<size_t>(i)] = rec.data(c, i);
    write_raw(out, row.data(), row.size() * sizeof(float));
  }
  if (!out) throw error(errc::io, "short write: " + path.string());
}

EegRecording read_eeg_csv(const std::filesystem::path& path, double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open CSV file: " + path.string());

  std::vector<std::vector<float>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<float> row;
    size_t pos = 0, col = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
      ++col;
      double value = 0.0;
      const char* begin = cell.c_str();
      const char* end = begin + cell.size();
      auto result = std::from_chars(begin, end, value);
      if (result.ec != std::errc() || result.ptr != end) {
        std::ostringstream msg;
        msg << path.string() << ": non-numeric cell \"" << cell << "\" at row " << line_no
            << ", column " << col;
        throw error(errc::non_numeric, msg.str());
      }
      row.push_back(static_cast<float>(value));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path.string() << ": row " << line_no << " has " << row.size()
          << " cells, expected " << rows.front().size();
      throw error(errc::ragged_rows, msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw error(errc::parse, path.string() + ": empty CSV");

  EegRecording rec;
  rec.sample_rate_hz = sample_rate_hz;
  rec.channels = static_cast<int>(rows.size());
  rec.samples = static_cast<long>(rows.front().size());
  rec.data.resize(rec.channels, rec.samples);
  for (int c = 0; c < rec.channels; ++c) {
    for (long i = 0; i < rec.samples; ++i) {
      rec.data(c, i) = rows[static_cast<size_t>(c)][static_cast<size_t>(i)];
    }
  }
  return rec;
}

OnsetAnnotation read_onsets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open onset file: " + path.string());

  OnsetAnnotation ann;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Tolerate CR line endings and blank lines.
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    double value = 0.0;
    const char* begin = line.c_str();
    const char* end = begin + line.size();
    auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
      std::ostringstream msg;
      msg << path.string() << ": non-numeric line " << line_no << ": \"" << line << "\"";
      throw error(errc::non_numeric, msg.str());
    }
    if (!ann.times_s.empty() && value <= ann.times_s.back()) {
      std::ostringstream msg;
      msg << path.string() << ": timestamps not ascending at line " << line_no << " ("
          << ann.times_s.back() << " -> " << value << ")";
      throw error(errc::not_ascending, msg.str());
    }
    ann.times_s.push_back(value);
  }
  return ann;
}

void write_onsets(const OnsetAnnotation& ann, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw error(errc::io, "cannot write onset file: " + path.string());
  char buf[64];
  for (double t : ann.times_s) {
    std::snprintf(buf, sizeof(buf), "%.6f\n", t);
    out << buf;
  }
}

ActivationCurve read_activation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io, "cannot open activation file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ACT1", 4) != 0) {
    throw error(errc::bad_magic, path.string() + ": not an ACT1 file");
  }
  uint32_t version = read_le<uint32_t>(in, path, "version");
  if (version != 1) {
    throw error(errc::version, path.string() + ": unsupported activation version " +
                                   std::to_string(version));
  }
  ActivationCurve curve;
  curve.sample_rate_hz = read_le<double>(in, path, "sample_rate_hz");
  uint64_t length = read_le<uint64_t>(in, path, "length");
  curve.values.resize(static_cast<size_t>(length));
  in.read(reinterpret_cast<char*>(curve.values.data()),
          static_cast<std::streamsize>(length * sizeof(double)));
  if (!in) throw error(errc::truncated_file, path.string() + ": payload shorter than header");
  return curve;
}

void write_activation(const ActivationCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io, "cannot write activation file: " + path.string());
  out.write("ACT1", 4);
  write_le<uint32_t>(out, 1);
  write_le<double>(out, curve.sample_rate_hz);
  write_le<uint64_t>(out, static_cast<uint64_t>(curve.values.size()));
  write_raw(out, curve.values.data(), curve.values.size() * sizeof(double));
  if (!out) throw error(errc::io, "short write: " + path.string());
}

}  // namespace neurobeat
