#pragma once

#include <vector>

#include "mwrecon/network.hpp"
#include "mwrecon/optimizer.hpp"
#include "mwrecon/tensor.hpp"

namespace mwrecon {

/// Source/target pairs for one network.
///
/// targets(b, ch, r, x) is the sample anchor_tap*dilation + m rows and
/// center_col columns away from sources(b, :, r, x), where m = ch % (R-1) + 1
/// and channels [0, R-1) are real parts, [R-1, 2(R-1)) imaginary parts.
struct TrainingSet {
  Tensor4 sources;
  Tensor4 targets;
  int dilation = 1;
  int anchor_tap = 0;
  int center_col = 0;
};

/// Concatenates sets of equal geometry along the batch axis.
TrainingSet concat_sets(std::span<const TrainingSet> sets);

/// Mean of squared residuals over batch, channel and position.
double loss(const ScanNetwork& net, const TrainingSet& set);

struct LossGradient {
  double loss = 0.0;
  ParameterSet grads;
};

/// Loss and its gradient w.r.t. every parameter block, by backpropagation.
LossGradient loss_and_gradient(const ScanNetwork& net, const TrainingSet& set);

struct TrainingResult {
  ScanNetwork net;
  std::vector<double> loss_history;  // loss before each update
};

/// Full-batch training for cfg.iterations steps. Throws TrainingError on a
/// non-finite loss.
TrainingResult train(ScanNetwork net, const TrainingSet& set, const OptimizerConfig& cfg);

}  // namespace mwrecon
