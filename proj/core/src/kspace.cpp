#include "mwrecon/kspace.hpp"

#include <algorithm>

namespace mwrecon {

RealImage::RealImage(std::size_t ny, std::size_t nx, std::vector<double> data)
    : ny_(ny), nx_(nx), data_(std::move(data)) {
  if (data_.size() != ny * nx) throw DimensionError("image payload does not match ny*nx");
}

RealImage sos_combine(const CoilImage& images) {
  RealImage out(images.ny(), images.nx());
  auto dst = out.data();
  for (std::size_t c = 0; c < images.n_coils(); ++c) {
    auto src = images.coil(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += std::norm(src[i]);
  }
  for (auto& v : dst) v = std::sqrt(v);
  return out;
}

double max_abs(std::span<const cdouble> values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

MultiCoilKSpace quantize_float32(const MultiCoilKSpace& k) {
  MultiCoilKSpace out = k;
  for (auto& v : out.data()) {
    v = {static_cast<double>(static_cast<float>(v.real())), static_cast<double>(static_cast<float>(v.imag()))};
  }
  return out;
}

}  // namespace mwrecon
