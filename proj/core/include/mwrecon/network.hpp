#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwrecon/tensor.hpp"

namespace mwrecon {

enum class Activation { relu, identity };

/// One valid 2-D convolution. ky taps are dilated by the network's dilation.
struct ConvSpec {
  int out_channels = 0;  // <= 0 on the final layer means 2*(R-1)
  int ky_taps = 1;
  int kx_width = 1;
  Activation activation = Activation::relu;

  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// Parses "32@5x2:relu" / "out@3x2" (kx width x ky taps). Throws std::invalid_argument.
ConvSpec parse_conv_spec(const std::string& text);
/// Parses a comma separated list of conv specs.
std::vector<ConvSpec> parse_layer_list(const std::string& text);
std::string format_layer_list(std::span<const ConvSpec> layers);

/// Combined footprint of a stack of convolutions.
struct ReceptiveField {
  int ky_taps = 1;      // in units of the dilation
  int kx_width = 1;
  int anchor_tap = 0;   // targets sit anchor_tap*dilation + m rows below the window top
  int center_col = 0;   // and center_col columns right of the window left edge
};

ReceptiveField receptive_field(std::span<const ConvSpec> layers);

struct NetworkArch {
  int in_channels = 0;
  int out_channels = 0;
  int dilation = 1;
  std::vector<ConvSpec> layers;     // resolved: last layer has out_channels set, identity
  std::optional<ConvSpec> skip;     // parallel linear path for residual networks

  /// Resolves the "out" placeholder, forces identity on the last layer and ReLU
  /// on no other, then validates. in = 2*n_coils, out = 2*(R-1), dilation = R.
  static NetworkArch build(int n_coils, int acceleration, std::vector<ConvSpec> layers,
                           std::optional<ConvSpec> skip = std::nullopt);

  /// Two-layer multi-weight network: 32@5x2 ReLU -> out@3x2.
  static NetworkArch two_layer(int n_coils, int acceleration);
  /// Three-layer baseline: 32@5x2 ReLU -> 8@1x1 ReLU -> out@3x2.
  static NetworkArch three_layer(int n_coils, int acceleration);
  /// Three-layer baseline plus a 5x2 linear skip.
  static NetworkArch residual(int n_coils, int acceleration);

  ReceptiveField field() const { return receptive_field(layers); }
  bool residual_net() const noexcept { return skip.has_value(); }

  /// Offset (rows, cols) of the main-path output inside the skip output.
  std::pair<int, int> skip_crop() const;

  /// Throws std::invalid_argument on inconsistent shapes.
  void validate() const;

  friend bool operator==(const NetworkArch&, const NetworkArch&) = default;
};

struct ConvLayer {
  ConvSpec spec;
  int in_channels = 0;
  std::vector<double> weights;  // [out][in][ky_tap][kx]

  std::size_t fan_in() const noexcept {
    return static_cast<std::size_t>(in_channels) * spec.ky_taps * spec.kx_width;
  }
  std::size_t fan_out() const noexcept {
    return static_cast<std::size_t>(spec.out_channels) * spec.ky_taps * spec.kx_width;
  }

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

/// Parameter blocks: one per main layer, then the skip layer if present.
using ParameterSet = std::vector<std::vector<double>>;

class ScanNetwork {
 public:
  ScanNetwork() = default;
  ScanNetwork(NetworkArch arch, std::vector<ConvLayer> layers, std::optional<ConvLayer> skip,
              std::uint64_t seed);

  const NetworkArch& arch() const noexcept { return arch_; }
  const std::vector<ConvLayer>& layers() const noexcept { return layers_; }
  std::vector<ConvLayer>& layers() noexcept { return layers_; }
  const std::optional<ConvLayer>& skip() const noexcept { return skip_; }
  std::optional<ConvLayer>& skip() noexcept { return skip_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::size_t block_count() const noexcept { return layers_.size() + (skip_ ? 1 : 0); }
  std::span<double> block(std::size_t i);
  std::span<const double> block(std::size_t i) const;
  ParameterSet zeros_like() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  /// Same weights, different ky dilation (used to run on a compacted lattice).
  ScanNetwork with_dilation(int dilation) const;

  friend bool operator==(const ScanNetwork&, const ScanNetwork&) = default;

 private:
  NetworkArch arch_;
  std::vector<ConvLayer> layers_;
  std::optional<ConvLayer> skip_;
  std::uint64_t seed_ = 0;
};

/// Glorot-uniform initialization, deterministic in the seed.
ScanNetwork init_network(const NetworkArch& arch, std::uint64_t seed);

/// Network output. Residual networks return main(x) + crop(skip(x)).
Tensor4 forward(const ScanNetwork& net, const Tensor4& input);
/// Main convolutional path only.
Tensor4 forward_main(const ScanNetwork& net, const Tensor4& input);
/// Skip path output cropped to the main path's spatial grid.
Tensor4 forward_skip(const ScanNetwork& net, const Tensor4& input);

/// Valid cross-correlation with ky dilation; weights [out][in][taps][width].
Tensor4 conv2d(const Tensor4& input, std::span<const double> weights, int out_channels, int ky_taps,
               int kx_width, int dilation);

}  // namespace mwrecon
