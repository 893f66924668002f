#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "neurobeat/error.hpp"

namespace neurobeat {

struct AdamState {
  long step{0};
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};

  explicit AdamState(long param_count = 0)
      : m(Eigen::VectorXd::Zero(param_count)), v(Eigen::VectorXd::Zero(param_count)) {}
};

// One bias-corrected Adam update in place:
//   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
//   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
inline void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
                      double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw error(errc::length_mismatch, "parameter, gradient, and state lengths must match");
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v.array() = state.beta2 * state.v.array() + (1.0 - state.beta2) * grads.array().square();
  double mc = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double vc = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -=
      lr * (state.m.array() / mc) / ((state.v.array() / vc).sqrt() + state.epsilon);
}

}  // namespace neurobeat
