#include "mwrecon/network.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "conv_kernels.hpp"
#include "mwrecon/error.hpp"
#include "mwrecon/random.hpp"

namespace mwrecon {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

int parse_positive(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || v <= 0) throw std::invalid_argument("bad " + what + " '" + s + "'");
  return v;
}

detail::ConvShape shape_of(const Tensor4& in, int out, int taps, int width, int dilation) {
  detail::ConvShape s{in.channels(), in.rows(), in.cols(), static_cast<std::size_t>(out),
                      static_cast<std::size_t>(taps), static_cast<std::size_t>(width),
                      static_cast<std::size_t>(dilation)};
  if (in.rows() < (s.taps - 1) * s.dilation + 1 || in.cols() < s.width) {
    throw DimensionError("input " + std::to_string(in.rows()) + "x" + std::to_string(in.cols()) +
                         " smaller than the convolution footprint");
  }
  return s;
}

void relu_inplace(Tensor4& t) {
  for (auto& v : t.data()) v = v > 0.0 ? v : 0.0;
}

}  // namespace

ConvSpec parse_conv_spec(const std::string& text) {
  // <channels|out>@<kx>x<ky>[:relu|:identity|:linear]
  const std::string s = trim(text);
  const auto at = s.find('@');
  if (at == std::string::npos) throw std::invalid_argument("layer spec '" + s + "' lacks '@'");
  ConvSpec spec;
  const std::string ch = trim(s.substr(0, at));
  spec.out_channels = ch == "out" ? 0 : parse_positive(ch, "channel count");

  std::string rest = s.substr(at + 1);
  spec.activation = Activation::relu;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    const std::string act = trim(rest.substr(colon + 1));
    if (act == "relu") {
      spec.activation = Activation::relu;
    } else if (act == "identity" || act == "linear") {
      spec.activation = Activation::identity;
    } else {
      throw std::invalid_argument("unknown activation '" + act + "'");
    }
    rest = rest.substr(0, colon);
  } else if (spec.out_channels == 0) {
    spec.activation = Activation::identity;
  }
  const auto x = rest.find('x');
  if (x == std::string::npos) throw std::invalid_argument("layer spec '" + s + "' lacks <kx>x<ky>");
  spec.kx_width = parse_positive(trim(rest.substr(0, x)), "kernel width");
  spec.ky_taps = parse_positive(trim(rest.substr(x + 1)), "kernel taps");
  return spec;
}

std::vector<ConvSpec> parse_layer_list(const std::string& text) {
  std::vector<ConvSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_conv_spec(item));
  }
  if (out.empty()) throw std::invalid_argument("empty layer list");
  return out;
}

std::string format_layer_list(std::span<const ConvSpec> layers) {
  std::ostringstream os;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (i) os << ", ";
    if (l.out_channels <= 0 || i + 1 == layers.size()) {
      os << "out";
    } else {
      os << l.out_channels;
    }
    os << '@' << l.kx_width << 'x' << l.ky_taps;
    if (i + 1 != layers.size()) os << (l.activation == Activation::relu ? ":relu" : ":identity");
  }
  return os.str();
}

ReceptiveField receptive_field(std::span<const ConvSpec> layers) {
  ReceptiveField f;
  for (const auto& l : layers) {
    f.ky_taps += l.ky_taps - 1;
    f.kx_width += l.kx_width - 1;
    f.anchor_tap += (l.ky_taps + 1) / 2 - 1;
    f.center_col += (l.kx_width + 1) / 2 - 1;
  }
  return f;
}

NetworkArch NetworkArch::build(int n_coils, int acceleration, std::vector<ConvSpec> layers,
                               std::optional<ConvSpec> skip) {
  if (layers.empty()) throw std::invalid_argument("network needs at least one layer");
  NetworkArch a;
  a.in_channels = 2 * n_coils;
  a.out_channels = 2 * (acceleration - 1);
  a.dilation = acceleration;
  a.layers = std::move(layers);
  a.layers.back().out_channels = a.out_channels;
  a.layers.back().activation = Activation::identity;
  if (skip) {
    skip->out_channels = a.out_channels;
    skip->activation = Activation::identity;
  }
  a.skip = skip;
  a.validate();
  return a;
}

NetworkArch NetworkArch::two_layer(int n_coils, int acceleration) {
  return build(n_coils, acceleration, {{32, 2, 5, Activation::relu}, {0, 2, 3, Activation::identity}});
}

NetworkArch NetworkArch::three_layer(int n_coils, int acceleration) {
  return build(n_coils, acceleration,
               {{32, 2, 5, Activation::relu}, {8, 1, 1, Activation::relu}, {0, 2, 3, Activation::identity}});
}

NetworkArch NetworkArch::residual(int n_coils, int acceleration) {
  auto a = three_layer(n_coils, acceleration);
  return build(n_coils, acceleration, a.layers, ConvSpec{0, 2, 5, Activation::identity});
}

std::pair<int, int> NetworkArch::skip_crop() const {
  if (!skip) return {0, 0};
  const auto main = field();
  const auto s = receptive_field(std::span<const ConvSpec>(&*skip, 1));
  return {(main.anchor_tap - s.anchor_tap) * dilation, main.center_col - s.center_col};
}

void NetworkArch::validate() const {
  if (in_channels <= 0 || in_channels % 2) throw std::invalid_argument("in_channels must be 2*n_coils");
  if (dilation < 2) throw std::invalid_argument("dilation (acceleration) must be >= 2");
  if (out_channels != 2 * (dilation - 1)) throw std::invalid_argument("out_channels must equal 2*(R-1)");
  if (layers.empty()) throw std::invalid_argument("network needs at least one layer");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.out_channels <= 0 || l.ky_taps <= 0 || l.kx_width <= 0) {
      throw std::invalid_argument("layer " + std::to_string(i) + " has a non-positive dimension");
    }
    const bool last = i + 1 == layers.size();
    if (last && (l.activation != Activation::identity || l.out_channels != out_channels)) {
      throw std::invalid_argument("final layer must be linear with 2*(R-1) outputs");
    }
    if (!last && l.activation != Activation::relu) {
      throw std::invalid_argument("hidden layer " + std::to_string(i) + " must use ReLU");
    }
  }
  const auto f = field();
  if (f.ky_taps < 2) throw std::invalid_argument("network needs at least two ky taps in total");
  if (skip) {
    if (skip->activation != Activation::identity || skip->out_channels != out_channels) {
      throw std::invalid_argument("skip path must be linear with 2*(R-1) outputs");
    }
    const auto s = receptive_field(std::span<const ConvSpec>(&*skip, 1));
    if (s.anchor_tap > f.anchor_tap || s.center_col > f.center_col ||
        (f.ky_taps - 1 - f.anchor_tap) < (s.ky_taps - 1 - s.anchor_tap) ||
        (f.kx_width - 1 - f.center_col) < (s.kx_width - 1 - s.center_col)) {
      throw std::invalid_argument("skip footprint must lie inside the main receptive field");
    }
  }
}

ScanNetwork::ScanNetwork(NetworkArch arch, std::vector<ConvLayer> layers, std::optional<ConvLayer> skip,
                         std::uint64_t seed)
    : arch_(std::move(arch)), layers_(std::move(layers)), skip_(std::move(skip)), seed_(seed) {}

std::span<double> ScanNetwork::block(std::size_t i) {
  return i < layers_.size() ? std::span<double>(layers_[i].weights) : std::span<double>(skip_.value().weights);
}

std::span<const double> ScanNetwork::block(std::size_t i) const {
  return i < layers_.size() ? std::span<const double>(layers_[i].weights)
                            : std::span<const double>(skip_.value().weights);
}

ParameterSet ScanNetwork::zeros_like() const {
  ParameterSet p;
  for (std::size_t i = 0; i < block_count(); ++i) p.emplace_back(block(i).size(), 0.0);
  return p;
}

std::size_t ScanNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < block_count(); ++i) n += block(i).size();
  return n;
}

bool ScanNetwork::all_finite() const {
  for (std::size_t i = 0; i < block_count(); ++i) {
    for (double w : block(i)) {
      if (!std::isfinite(w)) return false;
    }
  }
  return true;
}

ScanNetwork ScanNetwork::with_dilation(int dilation) const {
  ScanNetwork n = *this;
  n.arch_.dilation = dilation;
  return n;
}

ScanNetwork init_network(const NetworkArch& arch, std::uint64_t seed) {
  arch.validate();
  auto make = [&](const ConvSpec& spec, int in_channels, std::uint64_t index) {
    ConvLayer layer{spec, in_channels, {}};
    layer.weights.resize(static_cast<std::size_t>(spec.out_channels) * layer.fan_in());
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.fan_in() + layer.fan_out()));
    std::mt19937_64 rng(mix_seed(seed, {index}));
    for (auto& w : layer.weights) w = bound * (2.0 * uniform01(rng) - 1.0);
    return layer;
  };

  std::vector<ConvLayer> layers;
  int in = arch.in_channels;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    layers.push_back(make(arch.layers[i], in, i));
    in = arch.layers[i].out_channels;
  }
  std::optional<ConvLayer> skip;
  if (arch.skip) skip = make(*arch.skip, arch.in_channels, arch.layers.size());
  return ScanNetwork(arch, std::move(layers), std::move(skip), seed);
}

Tensor4 conv2d(const Tensor4& input, std::span<const double> weights, int out_channels, int ky_taps,
               int kx_width, int dilation) {
  const auto s = shape_of(input, out_channels, ky_taps, kx_width, dilation);
  if (weights.size() != s.out_channels * s.k()) throw DimensionError("conv2d: weight count mismatch");
  Tensor4 out(input.batch(), s.out_channels, s.out_rows(), s.out_cols());
  std::vector<double> col(s.k() * s.p());
  const detail::ConstRowMap w(weights.data(), static_cast<Eigen::Index>(s.out_channels),
                              static_cast<Eigen::Index>(s.k()));
  const detail::ConstRowMap c(col.data(), static_cast<Eigen::Index>(s.k()), static_cast<Eigen::Index>(s.p()));
  for (std::size_t b = 0; b < input.batch(); ++b) {
    detail::im2col(input.entry(b).data(), s, col.data());
    detail::RowMap o(out.entry(b).data(), static_cast<Eigen::Index>(s.out_channels),
                     static_cast<Eigen::Index>(s.p()));
    o.noalias() = w * c;
  }
  return out;
}

namespace {

void check_input(const ScanNetwork& net, const Tensor4& input) {
  if (static_cast<int>(input.channels()) != net.arch().in_channels) {
    throw DimensionError("network expects " + std::to_string(net.arch().in_channels) + " input channels, got " +
                         std::to_string(input.channels()));
  }
}

}  // namespace

Tensor4 forward_main(const ScanNetwork& net, const Tensor4& input) {
  check_input(net, input);
  const int d = net.arch().dilation;
  Tensor4 a = input;
  for (const auto& layer : net.layers()) {
    a = conv2d(a, layer.weights, layer.spec.out_channels, layer.spec.ky_taps, layer.spec.kx_width, d);
    if (layer.spec.activation == Activation::relu) relu_inplace(a);
  }
  return a;
}

Tensor4 forward_skip(const ScanNetwork& net, const Tensor4& input) {
  check_input(net, input);
  const auto& skip = net.skip().value();
  const int d = net.arch().dilation;
  const Tensor4 g = conv2d(input, skip.weights, skip.spec.out_channels, skip.spec.ky_taps, skip.spec.kx_width, d);

  const auto f = net.arch().field();
  const std::size_t rows = input.rows() - static_cast<std::size_t>((f.ky_taps - 1) * d);
  const std::size_t cols = input.cols() - static_cast<std::size_t>(f.kx_width - 1);
  const auto [oy, ox] = net.arch().skip_crop();
  Tensor4 out(g.batch(), g.channels(), rows, cols);
  for (std::size_t b = 0; b < g.batch(); ++b)
    for (std::size_t c = 0; c < g.channels(); ++c)
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t x = 0; x < cols; ++x)
          out(b, c, r, x) = g(b, c, r + static_cast<std::size_t>(oy), x + static_cast<std::size_t>(ox));
  return out;
}

Tensor4 forward(const ScanNetwork& net, const Tensor4& input) {
  Tensor4 out = forward_main(net, input);
  if (net.skip()) {
    const Tensor4 g = forward_skip(net, input);
    auto dst = out.data();
    auto src = g.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

}  // namespace mwrecon
