#include "neurobeat/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "neurobeat/error.hpp"

namespace neurobeat {

namespace {

constexpr char kMagic[4] = {'N', 'B', 'K', '1'};

template <typename T>
void write_le(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
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

}  // namespace

ModelCheckpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io, "cannot open checkpoint: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw error(errc::bad_magic, path.string() + ": not a checkpoint file");
  }
  uint32_t version = read_le<uint32_t>(in, path, "version");
  if (version != 1) {
    std::ostringstream msg;
    msg << path.string() << ": unsupported checkpoint version " << version;
    throw error(errc::version, msg.str());
  }

  ModelCheckpoint ckpt;
  uint8_t arch = read_le<uint8_t>(in, path, "arch");
  if (arch > 1) {
    std::ostringstream msg;
    msg << path.string() << ": unknown architecture tag " << static_cast<int>(arch);
    throw error(errc::parse, msg.str());
  }
  ckpt.arch = static_cast<Arch>(arch);
  ckpt.dims.input_channels = static_cast<int>(read_le<uint32_t>(in, path, "input_channels"));
  ckpt.dims.window_len = static_cast<int>(read_le<uint32_t>(in, path, "window_len"));
  ckpt.dims.hidden = static_cast<int>(read_le<uint32_t>(in, path, "hidden"));
  ckpt.dims.layers = static_cast<int>(read_le<uint32_t>(in, path, "layers"));
  ckpt.seed = read_le<uint64_t>(in, path, "seed");
  ckpt.epochs = static_cast<int>(read_le<uint32_t>(in, path, "epochs"));
  uint64_t count = read_le<uint64_t>(in, path, "weight_count");

  long expected = param_count(ckpt.arch, ckpt.dims);
  if (count != static_cast<uint64_t>(expected)) {
    std::ostringstream msg;
    msg << path.string() << ": weight count " << count << " does not match the "
        << arch_name(ckpt.arch) << " shape (expected " << expected << ")";
    throw error(errc::shape_mismatch, msg.str());
  }
  ckpt.weights.resize(static_cast<long>(count));
  in.read(reinterpret_cast<char*>(ckpt.weights.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) {
    throw error(errc::truncated_file, path.string() + ": truncated weight payload");
  }
  return ckpt;
}

void write_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path) {
  long expected = param_count(ckpt.arch, ckpt.dims);
  if (ckpt.weights.size() != expected) {
    std::ostringstream msg;
    msg << "checkpoint holds " << ckpt.weights.size() << " weights, " << arch_name(ckpt.arch)
        << " shape needs " << expected;
    throw error(errc::shape_mismatch, msg.str());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io, "cannot write checkpoint: " + path.string());
  out.write(kMagic, 4);
  write_le<uint32_t>(out, 1);
  write_le<uint8_t>(out, static_cast<uint8_t>(ckpt.arch));
  write_le<uint32_t>(out, static_cast<uint32_t>(ckpt.dims.input_channels));
  write_le<uint32_t>(out, static_cast<uint32_t>(ckpt.dims.window_len));
  write_le<uint32_t>(out, static_cast<uint32_t>(ckpt.dims.hidden));
  write_le<uint32_t>(out, static_cast<uint32_t>(ckpt.dims.layers));
  write_le<uint64_t>(out, ckpt.seed);
  write_le<uint32_t>(out, static_cast<uint32_t>(ckpt.epochs));
  write_le<uint64_t>(out, static_cast<uint64_t>(ckpt.weights.size()));
  out.write(reinterpret_cast<const char*>(ckpt.weights.data()),
            static_cast<std::streamsize>(ckpt.weights.size() * sizeof(double)));
  if (!out) throw error(errc::io, "failed writing checkpoint: " + path.string());
}

ActivationCurve predict_activation(const ModelCheckpoint& ckpt, const EegRecording& rec) {
  if (rec.channels != ckpt.dims.input_channels) {
    std::ostringstream msg;
    msg << "recording has " << rec.channels << " channels, checkpoint expects "
        << ckpt.dims.input_channels;
    throw error(errc::shape_mismatch, msg.str());
  }
  long t = ckpt.dims.window_len;
  if (t <= 0 || rec.samples % t != 0) {
    std::ostringstream msg;
    msg << "recording length " << rec.samples << " is not a whole number of " << t
        << "-sample windows";
    throw error(errc::shape_mismatch, msg.str());
  }

  ActivationCurve curve;
  curve.sample_rate_hz = rec.sample_rate_hz;
  curve.values.reserve(static_cast<size_t>(rec.samples));
  long n_windows = rec.samples / t;
  for (long w = 0; w < n_windows; ++w) {
    Eigen::MatrixXd window = rec.data.middleCols(w * t, t).cast<double>();
    Eigen::VectorXd logits = model_forward(ckpt.arch, ckpt.dims, ckpt.weights, window);
    for (long i = 0; i < t; ++i) {
      curve.values.push_back(0.5 * std::tanh(0.5 * logits(i)) + 0.5);
    }
  }
  return curve;
}

}  // namespace neurobeat
