#include "debut/convolution.hpp"

#include <sstream>

#include "debut/error.hpp"

namespace debut {

namespace {

std::size_t out_extent(std::size_t in, std::size_t k, std::size_t pad, std::size_t stride, const char* axis) {
  const std::size_t padded = in + 2 * pad;
  if (padded < k || (padded - k) % stride != 0) {
    std::ostringstream os;
    os << axis << ": (" << in << " + 2*" << pad << " - " << k << ") is not a nonnegative multiple of stride "
       << stride;
    throw ShapeError(ShapeErrorKind::non_integral, os.str());
  }
  return (padded - k) / stride + 1;
}

void check_input(const Tensor3& x, const ConvShape& shape) {
  if (x.channels() != shape.c_in || x.height() != shape.h_in || x.width() != shape.w_in) {
    std::ostringstream os;
    os << "input tensor is [" << x.channels() << ',' << x.height() << ',' << x.width() << "] but the layer expects ["
       << shape.c_in << ',' << shape.h_in << ',' << shape.w_in << ']';
    throw DimensionError(os.str());
  }
}

Tensor3 to_tensor(DenseMatrix&& y, const OutputShape& out, std::optional<std::span<const double>> bias) {
  if (bias && bias->size() != out.channels)
    throw DimensionError("bias has " + std::to_string(bias->size()) + " entries, expected " +
                         std::to_string(out.channels));
  Tensor3 t(out.channels, out.height, out.width, std::vector<double>(y.data().begin(), y.data().end()));
  if (bias) {
    for (std::size_t c = 0; c < out.channels; ++c)
      for (std::size_t i = 0; i < out.height; ++i)
        for (std::size_t j = 0; j < out.width; ++j) t(c, i, j) += (*bias)[c];
  }
  return t;
}

}  // namespace

OutputShape output_shape(const ConvShape& shape) {
  if (shape.c_in == 0 || shape.c_out == 0 || shape.k == 0 || shape.stride == 0)
    throw ShapeError(ShapeErrorKind::positivity, "convolution channels, kernel size and stride must be positive");
  return {shape.c_out, out_extent(shape.h_in, shape.k, shape.pad, shape.stride, "height"),
          out_extent(shape.w_in, shape.k, shape.pad, shape.stride, "width")};
}

Tensor3::Tensor3(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data)
    : c_(channels), h_(height), w_(width), data_(std::move(data)) {
  if (data_.size() != c_ * h_ * w_) throw LengthError("tensor data length does not equal c*h*w");
}

KernelTensor::KernelTensor(std::size_t c_out, std::size_t c_in, std::size_t k, std::vector<double> data)
    : c_out_(c_out), c_in_(c_in), k_(k), data_(std::move(data)) {
  if (data_.size() != c_out_ * c_in_ * k_ * k_) throw LengthError("kernel data length does not equal c_o*c_i*k*k");
}

DenseMatrix im2col(const Tensor3& x, const ConvShape& shape) {
  const OutputShape out = output_shape(shape);
  check_input(x, shape);
  const std::size_t k = shape.k;
  DenseMatrix cols(shape.kernel_cols(), out.height * out.width);
  for (std::size_t c = 0; c < shape.c_in; ++c) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        auto row = cols.row((c * k + ky) * k + kx);
        for (std::size_t oy = 0; oy < out.height; ++oy) {
          // Signed arithmetic for the padded border.
          const auto iy = static_cast<std::ptrdiff_t>(oy * shape.stride + ky) - static_cast<std::ptrdiff_t>(shape.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(shape.h_in)) continue;
          for (std::size_t ox = 0; ox < out.width; ++ox) {
            const auto ix =
                static_cast<std::ptrdiff_t>(ox * shape.stride + kx) - static_cast<std::ptrdiff_t>(shape.pad);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(shape.w_in)) continue;
            row[oy * out.width + ox] = x(c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
          }
        }
      }
    }
  }
  return cols;
}

DenseMatrix flatten_kernel(const KernelTensor& w) {
  const auto d = w.data();
  return DenseMatrix(w.c_out(), w.c_in() * w.k() * w.k(), std::vector<double>(d.begin(), d.end()));
}

Tensor3 conv_via_chain(const DebutChain& c, const Tensor3& x, const ConvShape& shape,
                       std::optional<std::span<const double>> bias, const ApplyOptions& opts) {
  if (c.rows_out() != shape.c_out || c.cols_in() != shape.kernel_cols()) {
    std::ostringstream os;
    os << "chain is " << c.rows_out() << " x " << c.cols_in() << " but the layer flattens to " << shape.c_out
       << " x " << shape.kernel_cols();
    throw DimensionError(os.str());
  }
  const OutputShape out = output_shape(shape);
  return to_tensor(chain_apply(c, im2col(x, shape), opts), out, bias);
}

Tensor3 conv_via_matrix(const DenseMatrix& f, const Tensor3& x, const ConvShape& shape,
                        std::optional<std::span<const double>> bias) {
  if (f.rows() != shape.c_out || f.cols() != shape.kernel_cols())
    throw DimensionError("kernel matrix does not match the layer shape");
  const OutputShape out = output_shape(shape);
  return to_tensor(dense_multiply(f, im2col(x, shape)), out, bias);
}

}  // namespace debut
