#include "debut/factor.hpp"

#include <cassert>
#include <sstream>

#include "debut/error.hpp"
#include "debut/rng.hpp"

namespace debut {

void check_shape(const FactorShape& sh) {
  if (sh.p == 0 || sh.q == 0 || sh.r == 0 || sh.s == 0 || sh.t == 0)
    throw ShapeError(ShapeErrorKind::positivity,
                     "factor " + to_string(sh) + ": all dimensions must be positive");
  if (sh.p % (sh.r * sh.t) != 0 || sh.q % (sh.s * sh.t) != 0)
    throw ShapeError(ShapeErrorKind::divisibility,
                     "factor " + to_string(sh) + ": p must be divisible by r*t and q by s*t");
  if (sh.p / (sh.r * sh.t) != sh.q / (sh.s * sh.t))
    throw ShapeError(ShapeErrorKind::block_count,
                     "factor " + to_string(sh) + ": p/(r*t) != q/(s*t)");
  assert(sh.p * sh.s == sh.q * sh.r);
}

FactorShape make_shape(std::size_t p, std::size_t q, std::size_t r, std::size_t s, std::size_t t) {
  FactorShape sh{p, q, r, s, t};
  check_shape(sh);
  return sh;
}

std::size_t nonzero_count(const FactorShape& sh) {
  assert(sh.p * sh.s == sh.q * sh.r);
  return sh.p * sh.s;
}

std::string to_string(const FactorShape& sh) {
  std::ostringstream os;
  os << "R(" << sh.p << ',' << sh.q << ")(" << sh.r << ',' << sh.s << ',' << sh.t << ')';
  return os.str();
}

Position position_of(const FactorShape& sh, std::size_t flat) {
  const std::size_t k = flat % sh.t;
  std::size_t rest = flat / sh.t;
  const std::size_t j = rest % sh.s;
  rest /= sh.s;
  const std::size_t i = rest % sh.r;
  const std::size_t d = rest / sh.r;
  return {d * sh.r * sh.t + i * sh.t + k, d * sh.s * sh.t + j * sh.t + k, flat};
}

std::vector<Position> positions(const FactorShape& sh) {
  std::vector<Position> out;
  out.reserve(nonzero_count(sh));
  std::size_t flat = 0;
  for (std::size_t d = 0; d < sh.blocks(); ++d)
    for (std::size_t i = 0; i < sh.r; ++i)
      for (std::size_t j = 0; j < sh.s; ++j)
        for (std::size_t k = 0; k < sh.t; ++k)
          out.push_back({d * sh.r * sh.t + i * sh.t + k, d * sh.s * sh.t + j * sh.t + k, flat++});
  return out;
}

DebutFactor::DebutFactor(const FactorShape& shape)
    : shape_(shape), values_(shape.p * shape.s, 0.0) {}

DebutFactor::DebutFactor(const FactorShape& shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.p * shape_.s) {
    std::ostringstream os;
    os << "factor " << to_string(shape_) << " expects " << shape_.p * shape_.s
       << " values, got " << values_.size();
    throw LengthError(os.str());
  }
}

DebutFactor new_factor(std::size_t p, std::size_t q, std::size_t r, std::size_t s, std::size_t t,
                       std::optional<std::vector<double>> values) {
  const FactorShape sh = make_shape(p, q, r, s, t);
  if (!values) return DebutFactor(sh);
  return DebutFactor(sh, std::move(*values));
}

DebutFactor random_init(const FactorShape& shape, const InitScheme& scheme, std::uint64_t seed) {
  check_shape(shape);
  Xoshiro256 rng(seed);
  std::vector<double> v(nonzero_count(shape));
  switch (scheme.kind) {
    case InitScheme::Kind::gaussian:
      for (auto& x : v) x = scheme.a * rng.gaussian();
      break;
    case InitScheme::Kind::uniform:
      for (auto& x : v) x = rng.uniform(scheme.a, scheme.b);
      break;
    case InitScheme::Kind::bipolar:
      for (auto& x : v) x = rng.sign();
      break;
  }
  return DebutFactor(shape, std::move(v));
}

}  // namespace debut
