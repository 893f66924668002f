#pragma once

#include <Eigen/Dense>
#include <vector>

#include "neurobeat/model.hpp"

namespace neurobeat {

// Stacked GRU with a shared per-timestep affine head. Per timestep and layer
// (h starts at zero):
//   z = sigmoid(Wz x + bz + Uz h + cz)
//   r = sigmoid(Wr x + br + Ur h + cr)
//   n = tanh  (Wn x + bn + r .* (Un h + cn))
//   h = (1 - z) .* n + z .* h
// logit_t = W_o * h_top(t) + b_o.
long gru_param_count(const ModelDims& dims);
Eigen::VectorXd gru_forward(const Eigen::VectorXd& params, const ModelDims& dims,
                            const Eigen::MatrixXd& window);
double gru_loss_and_gradient(const Eigen::VectorXd& params, const ModelDims& dims,
                             const std::vector<const WindowPair*>& batch, Eigen::VectorXd& grad,
                             double pos_weight);

}  // namespace neurobeat
