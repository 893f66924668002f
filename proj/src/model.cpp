#include "neurobeat/model.hpp"

#include <cmath>
#include <sstream>

#include "neurobeat/error.hpp"
#include "neurobeat/fcn.hpp"
#include "neurobeat/gru.hpp"
#include "neurobeat/rng.hpp"

namespace neurobeat {

namespace {

// One weight segment of the flat vector: matrices get uniform
// +-sqrt(6/(fan_in+fan_out)) draws, bias segments stay zero.
struct Segment {
  long count{0};
  long fan_in{0};   // 0 marks a bias segment
  long fan_out{0};
};

std::vector<Segment> layout(Arch arch, const ModelDims& d) {
  std::vector<Segment> segs;
  long t = d.window_len;
  long h = d.hidden;
  if (arch == Arch::fcn) {
    long in = static_cast<long>(d.input_channels) * t;
    segs.push_back({h * in, in, h});  // W1
    segs.push_back({h, 0, 0});        // b1
    segs.push_back({t * h, h, t});    // W2
    segs.push_back({t, 0, 0});        // b2
    return segs;
  }
  for (int layer = 0; layer < d.layers; ++layer) {
    long in = layer == 0 ? d.input_channels : h;
    for (int gate = 0; gate < 3; ++gate) segs.push_back({h * in, in, h});  // Wz,Wr,Wn
    for (int gate = 0; gate < 3; ++gate) segs.push_back({h * h, h, h});    // Uz,Ur,Un
    segs.push_back({6 * h, 0, 0});  // bz,br,bn,cz,cr,cn
  }
  segs.push_back({h, h, 1});  // W_o
  segs.push_back({1, 0, 0});  // b_o
  return segs;
}

}  // namespace

Arch parse_arch(const std::string& name) {
  if (name == "fcn") return Arch::fcn;
  if (name == "gru") return Arch::gru;
  throw error(errc::config, "unknown architecture '" + name + "' (expected fcn or gru)");
}

std::string arch_name(Arch arch) { return arch == Arch::fcn ? "fcn" : "gru"; }

ModelDims default_dims(Arch arch) {
  ModelDims d;
  if (arch == Arch::fcn) {
    d.hidden = 256;
    d.layers = 1;
  } else {
    d.hidden = 64;
    d.layers = 2;
  }
  return d;
}

long param_count(Arch arch, const ModelDims& dims) {
  return arch == Arch::fcn ? fcn_param_count(dims) : gru_param_count(dims);
}

Eigen::VectorXd init_params(Arch arch, const ModelDims& dims, uint64_t seed) {
  Eigen::VectorXd params(param_count(arch, dims));
  SplitMix64 rng{seed};
  long offset = 0;
  for (const Segment& seg : layout(arch, dims)) {
    if (seg.fan_in == 0) {
      params.segment(offset, seg.count).setZero();
    } else {
      double limit = std::sqrt(6.0 / static_cast<double>(seg.fan_in + seg.fan_out));
      for (long i = 0; i < seg.count; ++i) {
        params(offset + i) = rng.next_uniform(-limit, limit);
      }
    }
    offset += seg.count;
  }
  return params;
}

Eigen::VectorXd model_forward(Arch arch, const ModelDims& dims, const Eigen::VectorXd& params,
                              const Eigen::MatrixXd& window) {
  return arch == Arch::fcn ? fcn_forward(params, dims, window)
                           : gru_forward(params, dims, window);
}

double model_loss_and_gradient(Arch arch, const ModelDims& dims, const Eigen::VectorXd& params,
                               const std::vector<const WindowPair*>& batch,
                               Eigen::VectorXd& grad, double pos_weight) {
  return arch == Arch::fcn ? fcn_loss_and_gradient(params, dims, batch, grad, pos_weight)
                           : gru_loss_and_gradient(params, dims, batch, grad, pos_weight);
}

}  // namespace neurobeat
