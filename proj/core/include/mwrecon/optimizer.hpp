#pragma once

#include <string>

#include "mwrecon/network.hpp"

namespace mwrecon {

enum class OptimizerKind { sgd_momentum, adam };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int iterations = 1000;

  void validate() const;
};

struct SgdMomentumState {
  ParameterSet velocity;
};

/// v <- mu*v + eta*g ; w <- w - v, per parameter.
void sgd_momentum_step(ScanNetwork& net, const ParameterSet& grads, SgdMomentumState& state,
                       double learning_rate, double momentum);

struct AdamState {
  ParameterSet m;
  ParameterSet v;
  long step = 0;
};

void adam_step(ScanNetwork& net, const ParameterSet& grads, AdamState& state, const OptimizerConfig& cfg);

}  // namespace mwrecon
