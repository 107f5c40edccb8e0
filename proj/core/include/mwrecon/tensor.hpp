#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mwrecon {

/// Dense real tensor laid out [batch, channel, row, col].
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(std::size_t batch, std::size_t channels, std::size_t rows, std::size_t cols, double fill = 0.0)
      : batch_(batch), channels_(channels), rows_(rows), cols_(cols),
        data_(batch * channels * rows * cols, fill) {}

  /// Changes the shape, keeping capacity; contents are unspecified afterwards.
  void resize(std::size_t batch, std::size_t channels, std::size_t rows, std::size_t cols) {
    batch_ = batch;
    channels_ = channels;
    rows_ = rows;
    cols_ = cols;
    data_.resize(batch * channels * rows * cols);
  }

  std::size_t batch() const noexcept { return batch_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t plane_size() const noexcept { return rows_ * cols_; }
  std::size_t entry_size() const noexcept { return channels_ * rows_ * cols_; }

  double& operator()(std::size_t b, std::size_t c, std::size_t r, std::size_t x) {
    return data_[((b * channels_ + c) * rows_ + r) * cols_ + x];
  }
  double operator()(std::size_t b, std::size_t c, std::size_t r, std::size_t x) const {
    return data_[((b * channels_ + c) * rows_ + r) * cols_ + x];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  std::span<double> entry(std::size_t b) { return {data_.data() + b * entry_size(), entry_size()}; }
  std::span<const double> entry(std::size_t b) const {
    return {data_.data() + b * entry_size(), entry_size()};
  }

  bool same_shape(const Tensor4& o) const noexcept {
    return batch_ == o.batch_ && channels_ == o.channels_ && rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;

 private:
  std::size_t batch_ = 0;
  std::size_t channels_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Stacks tensors of equal (channel, row, col) shape along the batch axis.
Tensor4 concat_batch(std::span<const Tensor4> parts);

}  // namespace mwrecon
