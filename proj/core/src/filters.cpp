#include "mwrecon/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mwrecon {

void FilterParams::validate() const {
  if (all_pass) return;
  if (!(amplitude > 0.0)) throw std::invalid_argument("filter amplitude M must be > 0");
  if (!(cutoff > 0.0)) throw std::invalid_argument("filter cut-off D0 must be > 0");
  if (!(exponent > 0.0)) throw std::invalid_argument("filter exponent P must be > 0");
}

double normalized_radius(std::size_t ky, std::size_t kx, std::size_t ny, std::size_t nx) {
  const double u = (static_cast<double>(kx) - static_cast<double>(nx / 2)) / static_cast<double>(nx);
  const double v = (static_cast<double>(ky) - static_cast<double>(ny / 2)) / static_cast<double>(ny);
  return std::sqrt(u * u + v * v);
}

double WeightFilter::evaluate(const FilterParams& params, double radius) {
  if (params.all_pass) return 1.0;
  return params.amplitude * std::pow(radius * radius, params.exponent) / params.cutoff;
}

WeightFilter WeightFilter::make(const FilterParams& params, std::size_t ny, std::size_t nx) {
  params.validate();
  WeightFilter f;
  f.params_ = params;
  f.ny_ = ny;
  f.nx_ = nx;
  f.h_.resize(ny * nx);
  for (std::size_t y = 0; y < ny; ++y) {
    const double v = (static_cast<double>(y) - static_cast<double>(ny / 2)) / static_cast<double>(ny);
    for (std::size_t x = 0; x < nx; ++x) {
      const double u = (static_cast<double>(x) - static_cast<double>(nx / 2)) / static_cast<double>(nx);
      // r^(2P) evaluated as (r^2)^P so the center is exactly zero.
      f.h_[y * nx + x] = params.all_pass ? 1.0
                                         : params.amplitude * std::pow(u * u + v * v, params.exponent) /
                                               params.cutoff;
    }
  }
  f.max_ = f.h_.empty() ? 0.0 : *std::ranges::max_element(f.h_);
  return f;
}

MultiCoilKSpace apply_filter(const MultiCoilKSpace& kspace, const WeightFilter& filter) {
  if (kspace.ny() != filter.ny() || kspace.nx() != filter.nx()) {
    throw DimensionError("filter grid does not match k-space grid");
  }
  MultiCoilKSpace out = kspace;
  if (filter.all_pass()) return out;
  const auto h = filter.values();
  for (std::size_t c = 0; c < out.n_coils(); ++c) {
    auto dst = out.coil(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= h[i];
  }
  return out;
}

Deweighted remove_filter(const MultiCoilKSpace& kspace, const WeightFilter& filter, double eps) {
  if (kspace.ny() != filter.ny() || kspace.nx() != filter.nx()) {
    throw DimensionError("filter grid does not match k-space grid");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("de-weighting eps must be > 0");

  Deweighted out{kspace, std::vector<char>(filter.values().size(), 1)};
  if (filter.all_pass()) return out;

  const auto h = filter.values();
  for (std::size_t i = 0; i < h.size(); ++i) out.valid[i] = h[i] >= eps;
  for (std::size_t c = 0; c < out.kspace.n_coils(); ++c) {
    auto dst = out.kspace.coil(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = out.valid[i] ? dst[i] / h[i] : cdouble{};
  }
  return out;
}

double deweight_eps(const WeightFilter& filter, double rel) { return rel * filter.max_value(); }

}  // namespace mwrecon
