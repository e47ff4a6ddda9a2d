#pragma once

#include <stdexcept>
#include <string>

namespace debut {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ShapeErrorKind { positivity, divisibility, block_count, non_integral };

class ShapeError : public Error {
 public:
  ShapeError(ShapeErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  ShapeErrorKind kind() const noexcept { return kind_; }

 private:
  ShapeErrorKind kind_;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class AdjacencyError : public Error {
 public:
  using Error::Error;
};

class DensificationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class UnknownLayer : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NoChainFound : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable binary/text file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace debut
