#include "mwrecon/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "mwrecon/error.hpp"

namespace mwrecon {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd" || name == "sgd_momentum" || name == "sgd-momentum" || name == "momentum") {
    return OptimizerKind::sgd_momentum;
  }
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "sgd_momentum";
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("adam epsilon must be positive");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
}

namespace {

void check_grads(const ScanNetwork& net, const ParameterSet& grads) {
  if (grads.size() != net.block_count()) throw DimensionError("gradient block count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].size() != net.block(i).size()) throw DimensionError("gradient block size mismatch");
  }
}

}  // namespace

void sgd_momentum_step(ScanNetwork& net, const ParameterSet& grads, SgdMomentumState& state,
                       double learning_rate, double momentum) {
  check_grads(net, grads);
  if (state.velocity.empty()) state.velocity = net.zeros_like();
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto w = net.block(i);
    auto& v = state.velocity[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      v[j] = momentum * v[j] + learning_rate * grads[i][j];
      w[j] -= v[j];
    }
  }
}

void adam_step(ScanNetwork& net, const ParameterSet& grads, AdamState& state, const OptimizerConfig& cfg) {
  check_grads(net, grads);
  if (state.m.empty()) {
    state.m = net.zeros_like();
    state.v = net.zeros_like();
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto w = net.block(i);
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double g = grads[i][j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      w[j] -= cfg.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.adam_eps);
    }
  }
}

}  // namespace mwrecon
