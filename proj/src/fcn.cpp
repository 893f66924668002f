#include "neurobeat/fcn.hpp"

#include <sstream>

#include "neurobeat/error.hpp"
#include "neurobeat/loss.hpp"

namespace neurobeat {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FcnView {
  Eigen::Map<const RowMat> w1, w2;
  Eigen::Map<const Eigen::VectorXd> b1, b2;
};

FcnView view(const Eigen::VectorXd& params, const ModelDims& d) {
  long in = static_cast<long>(d.input_channels) * d.window_len;
  const double* p = params.data();
  long off = 0;
  Eigen::Map<const RowMat> w1(p + off, d.hidden, in);
  off += d.hidden * in;
  Eigen::Map<const Eigen::VectorXd> b1(p + off, d.hidden);
  off += d.hidden;
  Eigen::Map<const RowMat> w2(p + off, d.window_len, d.hidden);
  off += static_cast<long>(d.window_len) * d.hidden;
  Eigen::Map<const Eigen::VectorXd> b2(p + off, d.window_len);
  return {w1, w2, b1, b2};
}

void check_dims(const Eigen::VectorXd& params, const ModelDims& d) {
  if (d.layers != 1) {
    throw error(errc::shape_mismatch, "fcn has exactly one hidden layer");
  }
  if (d.input_channels <= 0 || d.window_len <= 0 || d.hidden <= 0) {
    throw error(errc::shape_mismatch, "fcn dimensions must be positive");
  }
  if (params.size() != fcn_param_count(d)) {
    std::ostringstream msg;
    msg << "parameter vector holds " << params.size() << " values, fcn needs "
        << fcn_param_count(d);
    throw error(errc::shape_mismatch, msg.str());
  }
}

void check_window(const Eigen::MatrixXd& window, const ModelDims& d) {
  if (window.rows() != d.input_channels || window.cols() != d.window_len) {
    std::ostringstream msg;
    msg << "window is " << window.rows() << "x" << window.cols() << ", expected "
        << d.input_channels << "x" << d.window_len;
    throw error(errc::shape_mismatch, msg.str());
  }
}

// Channel-major flatten of one window into a column of X.
void flatten_into(const Eigen::MatrixXd& window, Eigen::MatrixXd& x, long col) {
  long t = window.cols();
  for (long c = 0; c < window.rows(); ++c) {
    x.col(col).segment(c * t, t) = window.row(c).transpose();
  }
}

}  // namespace

long fcn_param_count(const ModelDims& d) {
  long in = static_cast<long>(d.input_channels) * d.window_len;
  return d.hidden * in + d.hidden + static_cast<long>(d.window_len) * d.hidden + d.window_len;
}

Eigen::VectorXd fcn_forward(const Eigen::VectorXd& params, const ModelDims& d,
                            const Eigen::MatrixXd& window) {
  check_dims(params, d);
  check_window(window, d);
  FcnView v = view(params, d);
  Eigen::MatrixXd x(static_cast<long>(d.input_channels) * d.window_len, 1);
  flatten_into(window, x, 0);
  Eigen::VectorXd hidden = ((v.w1 * x).colwise() + v.b1).cwiseMax(0.0);
  return v.w2 * hidden + v.b2;
}

double fcn_loss_and_gradient(const Eigen::VectorXd& params, const ModelDims& d,
                             const std::vector<const WindowPair*>& batch, Eigen::VectorXd& grad,
                             double pos_weight) {
  check_dims(params, d);
  if (batch.empty()) throw error(errc::empty_input, "gradient of an empty batch");
  long in = static_cast<long>(d.input_channels) * d.window_len;
  long b = static_cast<long>(batch.size());
  long t = d.window_len;

  Eigen::MatrixXd x(in, b);
  Eigen::MatrixXd y(t, b);
  for (long i = 0; i < b; ++i) {
    check_window(batch[static_cast<size_t>(i)]->eeg, d);
    if (batch[static_cast<size_t>(i)]->target.size() != t) {
      throw error(errc::shape_mismatch, "target length must equal the window length");
    }
    flatten_into(batch[static_cast<size_t>(i)]->eeg, x, i);
    y.col(i) = batch[static_cast<size_t>(i)]->target;
  }

  FcnView v = view(params, d);
  Eigen::MatrixXd hidden = ((v.w1 * x).colwise() + v.b1).cwiseMax(0.0);
  Eigen::MatrixXd logits = (v.w2 * hidden).colwise() + v.b2;

  double loss = bce_with_logits(logits.array(), y.array(), pos_weight);
  // d loss / d logit, including the mean normalization.
  Eigen::MatrixXd dlogits =
      bce_with_logits_grad(logits.array(), y.array(), pos_weight).matrix() /
      static_cast<double>(t * b);

  grad.setZero(params.size());
  double* g = grad.data();
  long off = 0;
  Eigen::Map<RowMat> gw1(g + off, d.hidden, in);
  off += d.hidden * in;
  Eigen::Map<Eigen::VectorXd> gb1(g + off, d.hidden);
  off += d.hidden;
  Eigen::Map<RowMat> gw2(g + off, t, d.hidden);
  off += t * d.hidden;
  Eigen::Map<Eigen::VectorXd> gb2(g + off, t);

  gw2 = dlogits * hidden.transpose();
  gb2 = dlogits.rowwise().sum();
  Eigen::MatrixXd dhidden = v.w2.transpose() * dlogits;
  dhidden = (hidden.array() > 0.0).select(dhidden, 0.0);
  gw1 = dhidden * x.transpose();
  gb1 = dhidden.rowwise().sum();
  return loss;
}

}  // namespace neurobeat
