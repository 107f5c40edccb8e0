#pragma once

#include <cstddef>
#include <vector>

#include "mwrecon/kspace.hpp"

namespace mwrecon {

/// Parameters of the radial high-pass weighting h = M * r^(2P) / D0.
struct FilterParams {
  double amplitude = 1.0;  // M
  double cutoff = 1.0;     // D0
  double exponent = 0.5;   // P
  bool all_pass = false;

  static FilterParams identity() { return {1.0, 1.0, 1.0, true}; }
  static FilterParams high_pass(double exponent, double amplitude = 1.0, double cutoff = 1.0) {
    return {amplitude, cutoff, exponent, false};
  }

  /// Throws std::invalid_argument unless M, D0, P > 0 (ignored for all-pass).
  void validate() const;

  friend bool operator==(const FilterParams&, const FilterParams&) = default;
};

/// Normalized radius of grid point (ky, kx): sqrt(u^2 + v^2) with
/// u = (kx - nx/2)/nx and v = (ky - ny/2)/ny, i.e. cycles/sample.
double normalized_radius(std::size_t ky, std::size_t kx, std::size_t ny, std::size_t nx);

/// A weighting matrix over an ny x nx k-space grid.
class WeightFilter {
 public:
  static WeightFilter make(const FilterParams& params, std::size_t ny, std::size_t nx);

  const FilterParams& params() const noexcept { return params_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nx() const noexcept { return nx_; }
  bool all_pass() const noexcept { return params_.all_pass; }

  double operator()(std::size_t ky, std::size_t kx) const { return h_[ky * nx_ + kx]; }
  std::span<const double> values() const noexcept { return h_; }
  double max_value() const noexcept { return max_; }

  /// Scalar evaluation of the weighting law at normalized radius r.
  static double evaluate(const FilterParams& params, double radius);

 private:
  WeightFilter() = default;

  FilterParams params_;
  std::size_t ny_ = 0;
  std::size_t nx_ = 0;
  std::vector<double> h_;
  double max_ = 0.0;
};

/// out[c, ky, kx] = h[ky, kx] * in[c, ky, kx].
MultiCoilKSpace apply_filter(const MultiCoilKSpace& kspace, const WeightFilter& filter);

struct Deweighted {
  MultiCoilKSpace kspace;
  std::vector<char> valid;  // ny*nx, true where h >= eps
};

/// Divides by h where h >= eps; elsewhere the output is zero and flagged invalid.
Deweighted remove_filter(const MultiCoilKSpace& kspace, const WeightFilter& filter, double eps);

/// eps = rel * max(h); the default bounds de-weighting gain at 1e6.
double deweight_eps(const WeightFilter& filter, double rel = 1e-6);

}  // namespace mwrecon
