#pragma once

#include <Eigen/Dense>

#include "neurobeat/error.hpp"

namespace neurobeat {

// Numerically stable binary cross-entropy on logits, averaged over elements:
//   mean( max(x,0) - x*y + log(1 + exp(-|x|)) )
// pos_weight scales the positive-class term (1 = plain BCE): the summand
// generalizes to (1-y)*softplus(x) + pw*y*softplus(-x), arranged below as
//   (1-y)*max(x,0) - pw*y*min(x,0) + (1 + (pw-1)*y)*log1p(exp(-|x|))
// so every term is nonnegative: a logit of -100 with target 0 yields exactly
// log1p(exp(-100)), never a catastrophic 100 - 100 cancellation.
inline double bce_with_logits(const Eigen::Ref<const Eigen::ArrayXXd>& logits,
                              const Eigen::Ref<const Eigen::ArrayXXd>& targets,
                              double pos_weight = 1.0) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols()) {
    throw error(errc::length_mismatch, "logits and targets must have matching shapes");
  }
  if (logits.size() == 0) throw error(errc::empty_input, "loss of an empty batch");
  Eigen::ArrayXXd tail = (-logits.abs()).exp().log1p();
  Eigen::ArrayXXd per = (1.0 - targets) * logits.cwiseMax(0.0) -
                        pos_weight * targets * logits.cwiseMin(0.0) +
                        (1.0 + (pos_weight - 1.0) * targets) * tail;
  return per.mean();
}

// Element-wise derivative of the bce_with_logits summand with respect to the
// logit (before the mean): pos_weight*y*(sigma(x)-1) + (1-y)*sigma(x), which
// reduces to sigma(x) - y for pos_weight 1.
inline Eigen::ArrayXXd bce_with_logits_grad(const Eigen::Ref<const Eigen::ArrayXXd>& logits,
                                            const Eigen::Ref<const Eigen::ArrayXXd>& targets,
                                            double pos_weight = 1.0) {
  Eigen::ArrayXXd sig = 0.5 * (logits * 0.5).tanh() + 0.5;  // stable sigmoid
  return pos_weight * targets * (sig - 1.0) + (1.0 - targets) * sig;
}

}  // namespace neurobeat
