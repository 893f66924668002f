#pragma once

#include <Eigen/Dense>
#include <vector>

#include "neurobeat/model.hpp"

namespace neurobeat {

// Fully connected net: logits = W2 * relu(W1 * flatten(window) + b1) + b2,
// with the window flattened channel-major (all of channel 0 first).
long fcn_param_count(const ModelDims& dims);
Eigen::VectorXd fcn_forward(const Eigen::VectorXd& params, const ModelDims& dims,
                            const Eigen::MatrixXd& window);
double fcn_loss_and_gradient(const Eigen::VectorXd& params, const ModelDims& dims,
                             const std::vector<const WindowPair*>& batch, Eigen::VectorXd& grad,
                             double pos_weight);

}  // namespace neurobeat
