#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "neurobeat/types.hpp"

namespace neurobeat {

enum class Arch : uint8_t { fcn = 0, gru = 1 };

Arch parse_arch(const std::string& name);
std::string arch_name(Arch arch);

// Shape hyperparameters shared by both architectures. For the FCN, `hidden`
// is the single hidden-layer width and `layers` must be 1; for the GRU,
// `hidden` is the per-layer state size and `layers` the stack depth.
struct ModelDims {
  int input_channels{125};
  int window_len{125};
  int hidden{0};
  int layers{0};
};

// Published defaults: FCN hidden 256; GRU two layers of 64 units.
ModelDims default_dims(Arch arch);

long param_count(Arch arch, const ModelDims& dims);

// Deterministic initialization: every weight matrix is drawn uniform in
// +-sqrt(6/(fan_in+fan_out)) from a SplitMix64 stream in flatten order;
// biases are zero. The flatten order is the checkpoint order:
//   FCN: W1, b1, W2, b2 (matrices row-major)
//   GRU: per layer Wz,Wr,Wn,Uz,Ur,Un,bz,br,bn,cz,cr,cn, then W_o,b_o.
Eigen::VectorXd init_params(Arch arch, const ModelDims& dims, uint64_t seed);

// Per-window logits (length window_len) for one channels x window_len input.
// Throws shape_mismatch if the window or parameter vector disagrees with
// `dims`.
Eigen::VectorXd model_forward(Arch arch, const ModelDims& dims, const Eigen::VectorXd& params,
                              const Eigen::MatrixXd& window);

// Mean BCE-with-logits loss over the batch and its exact analytic gradient
// in checkpoint flatten order. `grad` is resized to the parameter count.
double model_loss_and_gradient(Arch arch, const ModelDims& dims, const Eigen::VectorXd& params,
                               const std::vector<const WindowPair*>& batch,
                               Eigen::VectorXd& grad, double pos_weight = 1.0);

}  // namespace neurobeat
