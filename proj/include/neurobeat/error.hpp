#pragma once

#include <stdexcept>
#include <string>

namespace neurobeat {

// One error kind per contract failure the library can report. The CLI maps
// kinds to process exit codes (usage -> 1, data/validation -> 2, io/internal -> 3).
enum class errc {
  invalid_annotation,
  out_of_range,
  parse,
  integrity,
  version,
  bad_magic,
  truncated_file,
  shape_mismatch,
  ragged_rows,
  non_numeric,
  not_ascending,
  missing_cell,
  too_long,
  invalid_band,
  unstable_design,
  signal_too_short,
  length_mismatch,
  insufficient_data,
  empty_curve,
  non_positive_duration,
  jitter_too_large,
  degenerate_input,
  empty_input,
  empty_group,
  config,
  usage,
  io,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_annotation: return "invalid_annotation";
    case errc::out_of_range: return "out_of_range";
    case errc::parse: return "parse";
    case errc::integrity: return "integrity";
    case errc::version: return "version";
    case errc::bad_magic: return "bad_magic";
    case errc::truncated_file: return "truncated_file";
    case errc::shape_mismatch: return "shape_mismatch";
    case errc::ragged_rows: return "ragged_rows";
    case errc::non_numeric: return "non_numeric";
    case errc::not_ascending: return "not_ascending";
    case errc::missing_cell: return "missing_cell";
    case errc::too_long: return "too_long";
    case errc::invalid_band: return "invalid_band";
    case errc::unstable_design: return "unstable_design";
    case errc::signal_too_short: return "signal_too_short";
    case errc::length_mismatch: return "length_mismatch";
    case errc::insufficient_data: return "insufficient_data";
    case errc::empty_curve: return "empty_curve";
    case errc::non_positive_duration: return "non_positive_duration";
    case errc::jitter_too_large: return "jitter_too_large";
    case errc::degenerate_input: return "degenerate_input";
    case errc::empty_input: return "empty_input";
    case errc::empty_group: return "empty_group";
    case errc::config: return "config";
    case errc::usage: return "usage";
    case errc::io: return "io";
  }
  return "unknown";
}

}  // namespace neurobeat
