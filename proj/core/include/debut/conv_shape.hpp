#pragma once

#include <cstddef>

namespace debut {

/// A convolution layer: c_i input channels, c_o output channels, k x k kernel.
struct ConvShape {
  std::size_t c_in = 1;
  std::size_t c_out = 1;
  std::size_t k = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
  std::size_t h_in = 1;
  std::size_t w_in = 1;

  /// Rows of the flattened kernel matrix.
  std::size_t kernel_rows() const noexcept { return c_out; }
  /// Columns of the flattened kernel matrix, k*k*c_i.
  std::size_t kernel_cols() const noexcept { return k * k * c_in; }

  friend bool operator==(const ConvShape&, const ConvShape&) = default;
};

struct OutputShape {
  std::size_t channels;
  std::size_t height;
  std::size_t width;

  friend bool operator==(const OutputShape&, const OutputShape&) = default;
};

/// (c_o, H_o, W_o). Throws ShapeError when (H_i + 2 pad - k) is negative or not a
/// multiple of the stride (and likewise for W).
OutputShape output_shape(const ConvShape& shape);

}  // namespace debut
