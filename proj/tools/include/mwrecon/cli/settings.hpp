#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mwrecon/cli/config.hpp"
#include "mwrecon/recon.hpp"

namespace mwrecon::cli {

/// Reconstruction options shared by `recon`, `compare` and `ablate`.
struct ReconSettings {
  std::optional<std::vector<ConvSpec>> layers;
  OptimizerConfig optimizer;
  std::optional<std::vector<FilterParams>> filters;  // unset: default bank
  double filter_eps = 1e-6;
  bool normalize = true;
  int grappa_bx_half = 1;
  int grappa_by_taps = 2;
  double ridge = 0.0;

  ReconConfig make(Method method, const SamplingPattern& pattern, std::uint64_t seed, int threads) const;
  std::vector<FilterParams> filter_bank() const;
};

/// Axes and phantom description for `ablate`.
struct AblationSettings {
  std::vector<Method> methods;
  std::vector<int> accelerations;
  std::vector<int> acs;
  std::vector<double> exponents;    // P axis: one high-pass filter per cell
  std::vector<int> filter_counts;   // L axis: first L filters of the bank
  std::vector<int> depths;          // network depth axis
  int seeds = 1;
  int size = 64;
  int coils = 8;
  std::optional<double> snr_db;
  bool record_timings = false;
};

struct RunConfig {
  ReconSettings recon;
  AblationSettings ablation;
  std::optional<std::uint64_t> seed;

  /// Throws ConfigError naming the offending key and line.
  static RunConfig from(const ConfigFile& file);
  void validate_ablation() const;
};

/// Layers for a network of the given depth: d = 1 is a single out@5x2
/// layer, d = 2 the two-layer net, each extra level adds an 8@1x1 ReLU layer.
std::vector<ConvSpec> layers_for_depth(int depth);

}  // namespace mwrecon::cli
