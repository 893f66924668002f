#pragma once

#include <cstdint>
#include <filesystem>

#include "neurobeat/model.hpp"
#include "neurobeat/types.hpp"

namespace neurobeat {

struct ModelCheckpoint {
  Arch arch{Arch::fcn};
  ModelDims dims;
  uint64_t seed{0};
  int epochs{0};
  Eigen::VectorXd weights;  // flat, in the documented per-arch order
};

// Checkpoint interchange format, little-endian:
//   magic "NBK1"; u32 version = 1; u8 arch (0 = fcn, 1 = gru);
//   u32 input_channels; u32 window_len; u32 hidden; u32 layers;
//   u64 seed; u32 epochs; u64 weight_count; f64 weights[].
ModelCheckpoint read_checkpoint(const std::filesystem::path& path);
void write_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path);

// Runs the checkpointed model over every one-second window of a preprocessed
// recording and concatenates the sigmoid of the logits into one curve of
// length rec.samples. Throws shape_mismatch if the channel count disagrees
// with the checkpoint or the length is not whole seconds.
ActivationCurve predict_activation(const ModelCheckpoint& ckpt, const EegRecording& rec);

}  // namespace neurobeat
