#include "mwrecon/training.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conv_kernels.hpp"
#include "mwrecon/error.hpp"

namespace mwrecon {
namespace {

using detail::ConstRowMap;
using detail::ConvShape;
using detail::RowMap;

Eigen::Index ei(std::size_t v) { return static_cast<Eigen::Index>(v); }

void check_set(const ScanNetwork& net, const TrainingSet& set) {
  const auto& arch = net.arch();
  const auto f = arch.field();
  if (set.dilation != arch.dilation || set.anchor_tap != f.anchor_tap || set.center_col != f.center_col) {
    throw DimensionError("training set geometry does not match the network");
  }
  const auto& s = set.sources;
  const auto& t = set.targets;
  if (static_cast<int>(s.channels()) != arch.in_channels) throw DimensionError("source channel mismatch");
  if (static_cast<int>(t.channels()) != arch.out_channels) throw DimensionError("target channel mismatch");
  const std::size_t span = static_cast<std::size_t>((f.ky_taps - 1) * arch.dilation);
  const std::size_t wspan = static_cast<std::size_t>(f.kx_width - 1);
  if (s.rows() <= span || s.cols() <= wspan || t.batch() != s.batch() || t.rows() != s.rows() - span ||
      t.cols() != s.cols() - wspan) {
    throw DimensionError("targets do not match the network output shape");
  }
}

ConvShape shape(const Tensor4& in, const ConvLayer& l, int dilation) {
  return {in.channels(), in.rows(), in.cols(), static_cast<std::size_t>(l.spec.out_channels),
          static_cast<std::size_t>(l.spec.ky_taps), static_cast<std::size_t>(l.spec.kx_width),
          static_cast<std::size_t>(dilation)};
}

// Buffers reused across iterations. The im2col of the training sources does
// not change while training, so it is built once.
struct Workspace {
  bool input_cols_ready = false;
  std::vector<Tensor4> acts;  // acts[l]: output of main layer l, after activation
  std::vector<std::vector<double>> cols;
  std::vector<ConvShape> shapes;
  std::vector<double> skip_col;
  ConvShape skip_shape{};
  Tensor4 skip_out, delta, din;
  std::vector<double> dcol;
};

void build_cols(const Tensor4& in, const ConvShape& s, std::vector<double>& col) {
  const std::size_t per = s.k() * s.p();
  col.resize(per * in.batch());
  for (std::size_t b = 0; b < in.batch(); ++b) detail::im2col(in.entry(b).data(), s, col.data() + b * per);
}

void gemm_forward(const ConvLayer& layer, const ConvShape& s, const std::vector<double>& col, std::size_t batch,
                  Tensor4& z) {
  z.resize(batch, s.out_channels, s.out_rows(), s.out_cols());
  const ConstRowMap w(layer.weights.data(), ei(s.out_channels), ei(s.k()));
  const std::size_t per = s.k() * s.p();
  for (std::size_t b = 0; b < batch; ++b) {
    RowMap o(z.entry(b).data(), ei(s.out_channels), ei(s.p()));
    o.noalias() = w * ConstRowMap(col.data() + b * per, ei(s.k()), ei(s.p()));
  }
}

// Returns the network output (a reference into the workspace).
const Tensor4& run_forward(const ScanNetwork& net, const Tensor4& sources, Workspace& ws) {
  const int d = net.arch().dilation;
  const auto& layers = net.layers();
  const std::size_t batch = sources.batch();
  ws.acts.resize(layers.size());
  ws.cols.resize(layers.size());
  ws.shapes.resize(layers.size());

  if (!ws.input_cols_ready) {
    ws.shapes[0] = shape(sources, layers[0], d);
    build_cols(sources, ws.shapes[0], ws.cols[0]);
    if (net.skip()) {
      ws.skip_shape = shape(sources, *net.skip(), d);
      build_cols(sources, ws.skip_shape, ws.skip_col);
    }
    ws.input_cols_ready = true;
  }

  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (l > 0) {
      ws.shapes[l] = shape(ws.acts[l - 1], layers[l], d);
      build_cols(ws.acts[l - 1], ws.shapes[l], ws.cols[l]);
    }
    gemm_forward(layers[l], ws.shapes[l], ws.cols[l], batch, ws.acts[l]);
    if (layers[l].spec.activation == Activation::relu) {
      for (auto& v : ws.acts[l].data()) v = v > 0.0 ? v : 0.0;
    }
  }
  Tensor4& out = ws.acts.back();
  if (net.skip()) {
    gemm_forward(*net.skip(), ws.skip_shape, ws.skip_col, batch, ws.skip_out);
    const auto [oy, ox] = net.arch().skip_crop();
    for (std::size_t b = 0; b < out.batch(); ++b)
      for (std::size_t c = 0; c < out.channels(); ++c)
        for (std::size_t r = 0; r < out.rows(); ++r)
          for (std::size_t x = 0; x < out.cols(); ++x)
            out(b, c, r, x) += ws.skip_out(b, c, r + static_cast<std::size_t>(oy), x + static_cast<std::size_t>(ox));
  }
  return out;
}

void accumulate_weight_grad(const Tensor4& delta, const std::vector<double>& col, const ConvShape& s,
                            std::vector<double>& grad) {
  RowMap gw(grad.data(), ei(s.out_channels), ei(s.k()));
  const std::size_t per = s.k() * s.p();
  for (std::size_t b = 0; b < delta.batch(); ++b) {
    const ConstRowMap dz(delta.entry(b).data(), ei(s.out_channels), ei(s.p()));
    const ConstRowMap c(col.data() + b * per, ei(s.k()), ei(s.p()));
    gw.noalias() += dz * c.transpose();
  }
}

double forward_backward(const ScanNetwork& net, const TrainingSet& set, Workspace& ws, ParameterSet& grads) {
  const Tensor4& out = run_forward(net, set.sources, ws);
  const auto& layers = net.layers();
  for (auto& g : grads) std::ranges::fill(g, 0.0);

  ws.delta.resize(out.batch(), out.channels(), out.rows(), out.cols());
  double sum = 0.0;
  {
    const auto o = out.data();
    const auto t = set.targets.data();
    auto dd = ws.delta.data();
    const double n = static_cast<double>(o.size());
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double r = o[i] - t[i];
      sum += r * r;
      dd[i] = 2.0 * r / n;
    }
    sum /= n;
  }

  if (net.skip()) {
    const auto& s = ws.skip_shape;
    const auto [oy, ox] = net.arch().skip_crop();
    Tensor4& dg = ws.skip_out;  // forward values are no longer needed
    std::ranges::fill(dg.data(), 0.0);
    const Tensor4& delta = ws.delta;
    for (std::size_t b = 0; b < delta.batch(); ++b)
      for (std::size_t c = 0; c < delta.channels(); ++c)
        for (std::size_t r = 0; r < delta.rows(); ++r)
          for (std::size_t x = 0; x < delta.cols(); ++x)
            dg(b, c, r + static_cast<std::size_t>(oy), x + static_cast<std::size_t>(ox)) = delta(b, c, r, x);
    accumulate_weight_grad(dg, ws.skip_col, s, grads.back());
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& s = ws.shapes[l];
    if (layers[l].spec.activation == Activation::relu) {
      auto dd = ws.delta.data();
      const auto a = ws.acts[l].data();
      for (std::size_t i = 0; i < dd.size(); ++i) {
        if (!(a[i] > 0.0)) dd[i] = 0.0;
      }
    }
    accumulate_weight_grad(ws.delta, ws.cols[l], s, grads[l]);
    if (l == 0) break;

    const Tensor4& in = ws.acts[l - 1];
    ws.din.resize(in.batch(), in.channels(), in.rows(), in.cols());
    std::ranges::fill(ws.din.data(), 0.0);
    const ConstRowMap w(layers[l].weights.data(), ei(s.out_channels), ei(s.k()));
    ws.dcol.resize(s.k() * s.p());
    for (std::size_t b = 0; b < in.batch(); ++b) {
      RowMap dc(ws.dcol.data(), ei(s.k()), ei(s.p()));
      dc.noalias() = w.transpose() * ConstRowMap(ws.delta.entry(b).data(), ei(s.out_channels), ei(s.p()));
      detail::col2im_add(ws.dcol.data(), s, ws.din.entry(b).data());
    }
    std::swap(ws.delta, ws.din);
  }
  return sum;
}

}  // namespace

TrainingSet concat_sets(std::span<const TrainingSet> sets) {
  if (sets.empty()) return {};
  std::vector<Tensor4> sources, targets;
  for (const auto& s : sets) {
    if (s.dilation != sets[0].dilation || s.anchor_tap != sets[0].anchor_tap ||
        s.center_col != sets[0].center_col) {
      throw DimensionError("concat_sets: geometry differs between sets");
    }
    sources.push_back(s.sources);
    targets.push_back(s.targets);
  }
  return {concat_batch(sources), concat_batch(targets), sets[0].dilation, sets[0].anchor_tap,
          sets[0].center_col};
}

double loss(const ScanNetwork& net, const TrainingSet& set) {
  check_set(net, set);
  const Tensor4 out = forward(net, set.sources);
  const auto o = out.data();
  const auto t = set.targets.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double r = o[i] - t[i];
    sum += r * r;
  }
  return sum / static_cast<double>(o.size());
}

LossGradient loss_and_gradient(const ScanNetwork& net, const TrainingSet& set) {
  check_set(net, set);
  Workspace ws;
  LossGradient result;
  result.grads = net.zeros_like();
  result.loss = forward_backward(net, set, ws, result.grads);
  return result;
}

TrainingResult train(ScanNetwork net, const TrainingSet& set, const OptimizerConfig& cfg) {
  cfg.validate();
  check_set(net, set);
  TrainingResult result;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.iterations));
  Workspace ws;
  ParameterSet grads = net.zeros_like();
  SgdMomentumState sgd;
  AdamState adam;
  for (int it = 0; it < cfg.iterations; ++it) {
    const double l = forward_backward(net, set, ws, grads);
    if (!std::isfinite(l)) {
      throw TrainingError("non-finite training loss at iteration " + std::to_string(it));
    }
    result.loss_history.push_back(l);
    if (cfg.kind == OptimizerKind::adam) {
      adam_step(net, grads, adam, cfg);
    } else {
      sgd_momentum_step(net, grads, sgd, cfg.learning_rate, cfg.momentum);
    }
  }
  if (!net.all_finite()) throw TrainingError("non-finite network weights after training");
  result.net = std::move(net);
  return result;
}

}  // namespace mwrecon
