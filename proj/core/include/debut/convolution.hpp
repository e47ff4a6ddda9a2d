#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "debut/chain.hpp"
#include "debut/conv_shape.hpp"
#include "debut/dense.hpp"
#include "debut/kernels.hpp"

namespace debut {

/// Feature map [channels, height, width], channel-major then row-major.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0)
      : c_(channels), h_(height), w_(width), data_(channels * height * width, fill) {}
  Tensor3(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t channels() const noexcept { return c_; }
  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t c, std::size_t y, std::size_t x) noexcept { return data_[(c * h_ + y) * w_ + x]; }
  double operator()(std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data_[(c * h_ + y) * w_ + x];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t c_ = 0, h_ = 0, w_ = 0;
  std::vector<double> data_;
};

/// Convolution weights [c_o, c_i, k, k], row-major.
class KernelTensor {
 public:
  KernelTensor(std::size_t c_out, std::size_t c_in, std::size_t k, double fill = 0.0)
      : c_out_(c_out), c_in_(c_in), k_(k), data_(c_out * c_in * k * k, fill) {}
  KernelTensor(std::size_t c_out, std::size_t c_in, std::size_t k, std::vector<double> data);

  std::size_t c_out() const noexcept { return c_out_; }
  std::size_t c_in() const noexcept { return c_in_; }
  std::size_t k() const noexcept { return k_; }

  double& operator()(std::size_t o, std::size_t c, std::size_t ky, std::size_t kx) noexcept {
    return data_[((o * c_in_ + c) * k_ + ky) * k_ + kx];
  }
  double operator()(std::size_t o, std::size_t c, std::size_t ky, std::size_t kx) const noexcept {
    return data_[((o * c_in_ + c) * k_ + ky) * k_ + kx];
  }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t c_out_, c_in_, k_;
  std::vector<double> data_;
};

/// Patch matrix (k^2 c_i) x (H_o W_o). Column h_o*W_o + w_o holds the receptive field
/// of that output position; rows run over channel, then kernel row, then kernel column.
/// Out-of-range (padding) entries are zero.
DenseMatrix im2col(const Tensor3& x, const ConvShape& shape);

/// c_o x (k^2 c_i) with the same column order as im2col rows.
DenseMatrix flatten_kernel(const KernelTensor& w);

/// The layer with its flattened kernel replaced by the chain: reshape of
/// chain_apply(c, im2col(x)) plus an optional per-channel bias.
Tensor3 conv_via_chain(const DebutChain& c, const Tensor3& x, const ConvShape& shape,
                       std::optional<std::span<const double>> bias = std::nullopt,
                       const ApplyOptions& opts = {});

/// Same lowering with an explicit flattened kernel matrix F (c_o x k^2 c_i).
Tensor3 conv_via_matrix(const DenseMatrix& f, const Tensor3& x, const ConvShape& shape,
                        std::optional<std::span<const double>> bias = std::nullopt);

}  // namespace debut
