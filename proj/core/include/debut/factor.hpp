#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace debut {

/// Shape of a DeBut factor: a p x q matrix made of p/(r*t) diagonal blocks, each
/// block an r x s grid of t x t diagonal matrices.
struct FactorShape {
  std::size_t p = 1;
  std::size_t q = 1;
  std::size_t r = 1;
  std::size_t s = 1;
  std::size_t t = 1;

  /// Number of diagonal blocks, p/(r*t) == q/(s*t).
  std::size_t blocks() const noexcept { return p / (r * t); }

  friend bool operator==(const FactorShape&, const FactorShape&) = default;
};

/// Throws ShapeError unless every field is positive, p % (r*t) == 0, q % (s*t) == 0
/// and both give the same block count.
void check_shape(const FactorShape& shape);

/// Checked constructor for FactorShape.
FactorShape make_shape(std::size_t p, std::size_t q, std::size_t r, std::size_t s, std::size_t t);

/// Structural nonzero count p*s (== q*r). Zero values inside the pattern still count.
std::size_t nonzero_count(const FactorShape& shape);

std::string to_string(const FactorShape& shape);

struct Position {
  std::size_t row;
  std::size_t col;
  std::size_t index;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Matrix position of the value stored at flat index (d, i, j, k).
Position position_of(const FactorShape& shape, std::size_t flat_index);

/// All p*s pattern positions in flat-index order.
std::vector<Position> positions(const FactorShape& shape);

/// Initialization scheme for factor values.
struct InitScheme {
  enum class Kind { gaussian, uniform, bipolar };

  Kind kind = Kind::gaussian;
  double a = 1.0;  // sigma, or lower bound
  double b = 0.0;  // upper bound

  static InitScheme gaussian(double sigma) { return {Kind::gaussian, sigma, 0.0}; }
  static InitScheme uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  static InitScheme bipolar() { return {Kind::bipolar, 0.0, 0.0}; }
};

/// One DeBut factor with its values stored in [block, grid row, grid col, diagonal] order.
/// The nonzero at flat index ((d*r + i)*s + j)*t + k sits at
/// row d*r*t + i*t + k, column d*s*t + j*t + k.
class DebutFactor {
 public:
  /// All-zero values.
  explicit DebutFactor(const FactorShape& shape);
  /// Throws LengthError when values.size() != p*s.
  DebutFactor(const FactorShape& shape, std::vector<double> values);

  const FactorShape& shape() const noexcept { return shape_; }
  std::size_t rows() const noexcept { return shape_.p; }
  std::size_t cols() const noexcept { return shape_.q; }
  std::span<const double> values() const noexcept { return values_; }

  double value(std::size_t d, std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return values_[((d * shape_.r + i) * shape_.s + j) * shape_.t + k];
  }

  friend bool operator==(const DebutFactor&, const DebutFactor&) = default;

 private:
  FactorShape shape_;
  std::vector<double> values_;
};

/// Checked factory mirroring DebutFactor's constructors but validating the shape first.
DebutFactor new_factor(std::size_t p, std::size_t q, std::size_t r, std::size_t s, std::size_t t,
                       std::optional<std::vector<double>> values = std::nullopt);

/// Deterministic in (shape, scheme, seed) on every platform.
DebutFactor random_init(const FactorShape& shape, const InitScheme& scheme, std::uint64_t seed);

}  // namespace debut
