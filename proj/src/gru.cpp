#include "neurobeat/gru.hpp"

#include <sstream>
#include <vector>

#include "neurobeat/error.hpp"
#include "neurobeat/loss.hpp"

namespace neurobeat {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-layer views into the flat parameter vector. Wz,Wr,Wn are stored
// back-to-back row-major, so together they map as one 3h x in block (same
// for Uz,Ur,Un and the bias pairs); rows [0,h) belong to z, [h,2h) to r,
// [2h,3h) to n.
struct LayerView {
  Eigen::Map<const RowMat> w_all;  // 3h x in
  Eigen::Map<const RowMat> u_all;  // 3h x h
  Eigen::Map<const Eigen::VectorXd> b_all;  // input-side biases, 3h
  Eigen::Map<const Eigen::VectorXd> c_all;  // hidden-side biases, 3h
};

long layer_param_count(long in, long h) { return 3 * h * in + 3 * h * h + 6 * h; }

long layer_input_dim(const ModelDims& d, int layer) {
  return layer == 0 ? d.input_channels : d.hidden;
}

LayerView layer_view(const double* p, long offset, long in, long h) {
  Eigen::Map<const RowMat> w_all(p + offset, 3 * h, in);
  offset += 3 * h * in;
  Eigen::Map<const RowMat> u_all(p + offset, 3 * h, h);
  offset += 3 * h * h;
  Eigen::Map<const Eigen::VectorXd> b_all(p + offset, 3 * h);
  offset += 3 * h;
  Eigen::Map<const Eigen::VectorXd> c_all(p + offset, 3 * h);
  return {w_all, u_all, b_all, c_all};
}

void check_dims(const Eigen::VectorXd& params, const ModelDims& d) {
  if (d.input_channels <= 0 || d.window_len <= 0 || d.hidden <= 0 || d.layers <= 0) {
    throw error(errc::shape_mismatch, "gru dimensions must be positive");
  }
  if (params.size() != gru_param_count(d)) {
    std::ostringstream msg;
    msg << "parameter vector holds " << params.size() << " values, gru needs "
        << gru_param_count(d);
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

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& x) {
  return 0.5 * (x * 0.5).tanh() + 0.5;
}

// Everything the backward pass needs from one layer's forward sweep, stored
// time-major: column block t spans columns [t*B, (t+1)*B).
struct LayerTrace {
  Eigen::MatrixXd z, r, n, a;  // gate activations and hidden-side affine, h x T*B
  Eigen::MatrixXd h;           // post-update states, h x T*B
};

// Forward sweep of one layer over inputs x_all (in x T*B). Returns the
// states and fills the trace when requested.
Eigen::MatrixXd layer_forward(const LayerView& v, const Eigen::MatrixXd& x_all, long t_steps,
                              long b, LayerTrace* trace) {
  long h = v.u_all.cols();
  Eigen::MatrixXd a_x = v.w_all * x_all;  // 3h x T*B, one big product
  a_x.colwise() += v.b_all;

  Eigen::MatrixXd h_all(h, t_steps * b);
  Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(h, b);
  if (trace) {
    trace->z.resize(h, t_steps * b);
    trace->r.resize(h, t_steps * b);
    trace->n.resize(h, t_steps * b);
    trace->a.resize(h, t_steps * b);
  }
  Eigen::MatrixXd a_h(3 * h, b);
  for (long t = 0; t < t_steps; ++t) {
    a_h.noalias() = v.u_all * h_prev;
    a_h.colwise() += v.c_all;
    auto ax_blk = a_x.middleCols(t * b, b);
    Eigen::ArrayXXd z = sigmoid(ax_blk.topRows(h).array() + a_h.topRows(h).array());
    Eigen::ArrayXXd r = sigmoid(ax_blk.middleRows(h, h).array() + a_h.middleRows(h, h).array());
    Eigen::ArrayXXd a = a_h.bottomRows(h).array();
    Eigen::ArrayXXd n = (ax_blk.bottomRows(h).array() + r * a).tanh();
    Eigen::ArrayXXd h_new = (1.0 - z) * n + z * h_prev.array();
    h_all.middleCols(t * b, b) = h_new.matrix();
    if (trace) {
      trace->z.middleCols(t * b, b) = z.matrix();
      trace->r.middleCols(t * b, b) = r.matrix();
      trace->n.middleCols(t * b, b) = n.matrix();
      trace->a.middleCols(t * b, b) = a.matrix();
    }
    h_prev = h_all.middleCols(t * b, b);
  }
  if (trace) trace->h = h_all;
  return h_all;
}

}  // namespace

long gru_param_count(const ModelDims& d) {
  long total = 0;
  for (int layer = 0; layer < d.layers; ++layer) {
    total += layer_param_count(layer_input_dim(d, layer), d.hidden);
  }
  return total + d.hidden + 1;  // shared head W_o, b_o
}

Eigen::VectorXd gru_forward(const Eigen::VectorXd& params, const ModelDims& d,
                            const Eigen::MatrixXd& window) {
  check_dims(params, d);
  check_window(window, d);
  long t_steps = d.window_len;
  long h = d.hidden;

  Eigen::MatrixXd x_all = window;  // in x T, batch of one
  long offset = 0;
  for (int layer = 0; layer < d.layers; ++layer) {
    long in = layer_input_dim(d, layer);
    LayerView v = layer_view(params.data(), offset, in, h);
    offset += layer_param_count(in, h);
    x_all = layer_forward(v, x_all, t_steps, 1, nullptr);
  }
  Eigen::Map<const Eigen::VectorXd> w_o(params.data() + offset, h);
  double b_o = params(offset + h);
  return (x_all.transpose() * w_o).array() + b_o;
}

double gru_loss_and_gradient(const Eigen::VectorXd& params, const ModelDims& d,
                             const std::vector<const WindowPair*>& batch, Eigen::VectorXd& grad,
                             double pos_weight) {
  check_dims(params, d);
  if (batch.empty()) throw error(errc::empty_input, "gradient of an empty batch");
  long t_steps = d.window_len;
  long b = static_cast<long>(batch.size());
  long h = d.hidden;
  long cols = t_steps * b;

  // Pack the batch time-major: column t*B + i is window i at timestep t.
  Eigen::MatrixXd x_all(d.input_channels, cols);
  Eigen::MatrixXd y(t_steps, b);
  for (long i = 0; i < b; ++i) {
    const WindowPair& pair = *batch[static_cast<size_t>(i)];
    check_window(pair.eeg, d);
    if (pair.target.size() != t_steps) {
      throw error(errc::shape_mismatch, "target length must equal the window length");
    }
    for (long t = 0; t < t_steps; ++t) x_all.col(t * b + i) = pair.eeg.col(t);
    y.col(i) = pair.target;
  }

  // Forward through the stack, keeping each layer's trace and input.
  std::vector<LayerTrace> traces(static_cast<size_t>(d.layers));
  std::vector<Eigen::MatrixXd> inputs(static_cast<size_t>(d.layers));
  std::vector<long> offsets(static_cast<size_t>(d.layers));
  long offset = 0;
  Eigen::MatrixXd current = std::move(x_all);
  for (int layer = 0; layer < d.layers; ++layer) {
    long in = layer_input_dim(d, layer);
    offsets[static_cast<size_t>(layer)] = offset;
    LayerView v = layer_view(params.data(), offset, in, h);
    offset += layer_param_count(in, h);
    inputs[static_cast<size_t>(layer)] = std::move(current);
    current = layer_forward(v, inputs[static_cast<size_t>(layer)], t_steps, b,
                            &traces[static_cast<size_t>(layer)]);
  }
  long head_offset = offset;
  Eigen::Map<const Eigen::VectorXd> w_o(params.data() + head_offset, h);
  double b_o = params(head_offset + h);

  // Head logits: row vector over T*B columns, then viewed as (t, i).
  Eigen::RowVectorXd logits_row = (w_o.transpose() * current).array() + b_o;
  Eigen::MatrixXd logits(t_steps, b);
  for (long t = 0; t < t_steps; ++t)
    logits.row(t) = logits_row.segment(t * b, b);

  double loss = bce_with_logits(logits.array(), y.array(), pos_weight);
  Eigen::MatrixXd dlogits =
      bce_with_logits_grad(logits.array(), y.array(), pos_weight).matrix() /
      static_cast<double>(cols);
  Eigen::RowVectorXd dlogits_row(cols);
  for (long t = 0; t < t_steps; ++t) dlogits_row.segment(t * b, b) = dlogits.row(t);

  grad.setZero(params.size());
  double* g = grad.data();

  // Head gradients and the gradient flowing into the top layer's states.
  Eigen::Map<Eigen::VectorXd> gw_o(g + head_offset, h);
  gw_o = current * dlogits_row.transpose();
  g[head_offset + h] = dlogits_row.sum();
  Eigen::MatrixXd dh_ext = w_o * dlogits_row;  // h x T*B outer product

  // Backward through the stack.
  for (int layer = d.layers - 1; layer >= 0; --layer) {
    long in = layer_input_dim(d, layer);
    const LayerTrace& tr = traces[static_cast<size_t>(layer)];
    LayerView v = layer_view(params.data(), offsets[static_cast<size_t>(layer)], in, h);

    Eigen::MatrixXd d_w(3 * h, cols);  // rows: dz_raw, dr_raw, dn_raw
    Eigen::MatrixXd d_u(3 * h, cols);  // rows: dz_raw, dr_raw, da
    Eigen::MatrixXd carry = Eigen::MatrixXd::Zero(h, b);
    for (long t = t_steps - 1; t >= 0; --t) {
      Eigen::ArrayXXd dh = dh_ext.middleCols(t * b, b).array() + carry.array();
      auto z = tr.z.middleCols(t * b, b).array();
      auto r = tr.r.middleCols(t * b, b).array();
      auto n = tr.n.middleCols(t * b, b).array();
      auto a = tr.a.middleCols(t * b, b).array();
      Eigen::ArrayXXd h_prev = Eigen::ArrayXXd::Zero(h, b);
      if (t > 0) h_prev = tr.h.middleCols((t - 1) * b, b).array();
      Eigen::ArrayXXd dz_raw = dh * (h_prev - n) * z * (1.0 - z);
      Eigen::ArrayXXd dn_raw = dh * (1.0 - z) * (1.0 - n.square());
      Eigen::ArrayXXd da = dn_raw * r;
      Eigen::ArrayXXd dr_raw = dn_raw * a * r * (1.0 - r);

      auto dw_blk = d_w.middleCols(t * b, b);
      dw_blk.topRows(h) = dz_raw.matrix();
      dw_blk.middleRows(h, h) = dr_raw.matrix();
      dw_blk.bottomRows(h) = dn_raw.matrix();
      auto du_blk = d_u.middleCols(t * b, b);
      du_blk.topRows(h) = dz_raw.matrix();
      du_blk.middleRows(h, h) = dr_raw.matrix();
      du_blk.bottomRows(h) = da.matrix();

      carry.noalias() = v.u_all.transpose() * du_blk;
      carry.array() += dh * z;
    }

    long off = offsets[static_cast<size_t>(layer)];
    Eigen::Map<RowMat> gw_all(g + off, 3 * h, in);
    off += 3 * h * in;
    Eigen::Map<RowMat> gu_all(g + off, 3 * h, h);
    off += 3 * h * h;
    Eigen::Map<Eigen::VectorXd> gb_all(g + off, 3 * h);
    off += 3 * h;
    Eigen::Map<Eigen::VectorXd> gc_all(g + off, 3 * h);

    const Eigen::MatrixXd& x_layer = inputs[static_cast<size_t>(layer)];
    gw_all = d_w * x_layer.transpose();
    // State t-1 pairs with the deltas of step t; step 0 pairs with h0 = 0.
    if (t_steps > 1) {
      gu_all = d_u.rightCols((t_steps - 1) * b) * tr.h.leftCols((t_steps - 1) * b).transpose();
    }
    gb_all = d_w.rowwise().sum();
    gc_all = d_u.rowwise().sum();

    if (layer > 0) dh_ext = v.w_all.transpose() * d_w;  // becomes dx for the layer below
  }
  return loss;
}

}  // namespace neurobeat
