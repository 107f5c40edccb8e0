#include "mwrecon/tensor.hpp"

#include <algorithm>

#include "mwrecon/error.hpp"

namespace mwrecon {

Tensor4 concat_batch(std::span<const Tensor4> parts) {
  if (parts.empty()) return {};
  const Tensor4& first = parts.front();
  std::size_t batch = 0;
  for (const auto& p : parts) {
    if (p.channels() != first.channels() || p.rows() != first.rows() || p.cols() != first.cols()) {
      throw DimensionError("concat_batch: entries differ in channel or spatial shape");
    }
    batch += p.batch();
  }
  Tensor4 out(batch, first.channels(), first.rows(), first.cols());
  auto dst = out.data().begin();
  for (const auto& p : parts) dst = std::ranges::copy(p.data(), dst).out;
  return out;
}

}  // namespace mwrecon
