#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwrecon/filters.hpp"
#include "mwrecon/grappa.hpp"
#include "mwrecon/kspace.hpp"
#include "mwrecon/network.hpp"
#include "mwrecon/optimizer.hpp"
#include "mwrecon/sampling.hpp"
#include "mwrecon/training.hpp"

namespace mwrecon {

enum class Method { grappa, raki, rraki, mw_raki, mw_rraki };

/// Accepts "mw_raki" and "mw-raki" spellings. Throws std::invalid_argument.
Method parse_method(std::string_view name);
std::string to_string(Method method);
bool is_network_method(Method method) noexcept;
bool is_multiweight(Method method) noexcept;
bool is_residual(Method method) noexcept;

/// The high-pass weighting bank; the all-pass branch is always implied.
struct MultiWeightConfig {
  std::vector<FilterParams> high_pass;
  double eps_rel = 1e-6;

  /// Two filters, P = 0.6 and P = 0.2.
  static MultiWeightConfig default_bank();

  std::size_t branch_count() const noexcept { return high_pass.size() + 1; }
  /// All-pass filter first, then the high-pass filters in order.
  std::vector<WeightFilter> materialize(std::size_t ny, std::size_t nx) const;
  void validate() const;
};

struct ReconConfig {
  ReconConfig(Method method, SamplingPattern pattern);

  Method method;
  SamplingPattern pattern;
  int grappa_bx_half = 1;
  int grappa_by_taps = 2;
  double ridge = 0.0;
  std::optional<std::vector<ConvSpec>> layers;  // overrides the per-method default
  OptimizerConfig optimizer;
  MultiWeightConfig multiweight = MultiWeightConfig::default_bank();
  std::uint64_t seed = 42;
  bool normalize = true;
  int threads = 1;

  KernelGeometry grappa_geometry() const;
  /// Default layers: two-layer for mw_raki, three-layer otherwise; a linear
  /// 5x2 skip for the residual methods.
  NetworkArch network_arch(std::size_t n_coils) const;
  /// Filters actually used: the configured bank for mw_* methods, none otherwise.
  MultiWeightConfig effective_multiweight() const;
  void validate() const;
};

struct ReconTimings {
  double train_ms = 0.0;
  double infer_ms = 0.0;
  double total_ms = 0.0;
};

struct ReconResult {
  MultiCoilKSpace kspace;
  CoilImage coil_images;
  RealImage sos;
  std::vector<std::vector<double>> loss_histories;  // one per coil network
  ReconTimings timings;
  ReconConfig config;
  double scale = 1.0;  // max |measured| used for normalization

  /// Mean over coils of the per-iteration training loss.
  std::vector<double> mean_loss_history() const;
};

/// Real/imag channel split: channels [0, nc) real, [nc, 2nc) imaginary.
Tensor4 to_channels(const MultiCoilKSpace& k);

/// Training pairs from fully sampled calibration rows for one target coil.
///
/// Every sliding window position that keeps the full receptive field and
/// all R-1 targets inside the block is used. Throws Error when the block is
/// shorter than the minimum, which the message reports.
TrainingSet build_training_pairs(const MultiCoilKSpace& acs, const NetworkArch& arch,
                                 std::size_t target_coil);

/// Minimum calibration rows needed by build_training_pairs.
std::size_t min_training_rows(const NetworkArch& arch);

/// Weighted copies of the grid; entry j is filters[j] applied to data.
std::vector<MultiCoilKSpace> build_mw_batch(const MultiCoilKSpace& data,
                                            std::span<const WeightFilter> filters);

ReconResult grappa_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg);
ReconResult raki_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg);
ReconResult mw_reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg);

/// Dispatches on cfg.method.
ReconResult reconstruct(const MultiCoilKSpace& measured, const ReconConfig& cfg);

/// ifft2c per coil followed by sum-of-squares.
RealImage reconstruct_image(const MultiCoilKSpace& kspace);

}  // namespace mwrecon
