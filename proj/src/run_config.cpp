#include "neurobeat/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "neurobeat/error.hpp"

namespace neurobeat {

const std::vector<ConfigKeyDef>& config_registry() {
  static const std::vector<ConfigKeyDef> registry{
      {"threads", "0", "worker threads; 0 = NEUROBEAT_THREADS or machine parallelism"},
      {"filter.low_hz", "0.1", "bandpass high-pass corner"},
      {"filter.high_hz", "40", "bandpass low-pass corner"},
      {"filter.order", "4", "order of each bandpass half"},
      {"pad.target_samples", "0", "zero-pad length; 0 = round up to a whole second"},
      {"stft.frame_len", "32", "STFT frame length in samples"},
      {"stft.hop", "4", "STFT hop in samples"},
      {"peak.w1", "3", "pre-max window, frames"},
      {"peak.w2", "3", "post-max window, frames"},
      {"peak.w3", "12", "pre-average window, frames"},
      {"peak.w4", "6", "post-average window, frames"},
      {"peak.w5", "12", "minimum distance between onsets, frames"},
      {"peak.delta", "0.1", "adaptive threshold offset"},
      {"cluster.gap_s", "0.05", "channel-pooling cluster gap, seconds"},
      {"train.arch", "gru", "model architecture: fcn | gru"},
      {"train.epochs", "50", "training epochs per fold"},
      {"train.lr", "0.001", "Adam learning rate"},
      {"train.batch", "32", "minibatch size in windows"},
      {"train.seed", "0", "master training seed"},
      {"train.folds", "20", "cross-validation folds; must equal the subject count"},
      {"train.pos_weight", "1", "positive-class weight in the loss"},
      {"train.hidden", "0", "hidden width; 0 = architecture default"},
      {"train.widen", "0", "target widening radius, samples"},
      {"train.drop_silent_tail", "false", "drop all-zero trailing windows per recording"},
      {"synth.subjects", "6", "synthetic subjects"},
      {"synth.songs", "3", "synthetic songs"},
      {"synth.duration_s", "60", "synthetic song duration, seconds"},
      {"synth.channels", "125", "synthetic channel count"},
      {"synth.rate_hz", "125", "synthetic sample rate"},
      {"synth.bpm", "100", "synthetic beat rate"},
      {"synth.jitter_s", "0.02", "uniform onset jitter bound, seconds"},
      {"synth.snr_db", "0", "evoked-response SNR in dB"},
      {"synth.kernel", "damped_sine", "evoked kernel: damped_sine | delta"},
      {"synth.seed", "42", "synthetic dataset seed"},
      {"eval.tolerance_s", "0.1", "matching tolerance for evaluate"},
      {"report.tolerance_s", "0.1", "tolerance selected for report plots"},
      {"report.perm_seed", "0", "permutation-test seed for correlations"},
  };
  return registry;
}

bool is_known_config_key(const std::string& key) {
  for (const ConfigKeyDef& def : config_registry()) {
    if (key == def.key) return true;
  }
  return false;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse, path.string() + ": " + e.what());
  }
  if (!j.is_object()) {
    throw error(errc::config, path.string() + ": config must be a flat JSON object");
  }
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : j.items()) {
    if (!is_known_config_key(key)) {
      throw error(errc::config, path.string() + ": unknown config key '" + key + "'");
    }
    if (value.is_string()) {
      values[key] = value.get<std::string>();
    } else if (value.is_boolean()) {
      values[key] = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      values[key] = value.dump();
    } else {
      throw error(errc::config,
                  path.string() + ": key '" + key + "' must be a scalar, got " + value.dump());
    }
  }
  return values;
}

long config_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw error(errc::config, "config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

double config_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw error(errc::config, "config key '" + key + "': expected a number, got '" + value + "'");
  }
}

bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw error(errc::config, "config key '" + key + "': expected true/false, got '" + value + "'");
}

unsigned long long config_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw error(errc::config, "config key '" + key + "': expected a seed, got '" + value + "'");
  }
}

}  // namespace neurobeat
