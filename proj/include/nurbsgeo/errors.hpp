#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nurbsgeo {

/// Base of every error thrown by the library. The message can be prefixed
/// after the fact so pipeline stages can name themselves.
class Error : public std::exception {
public:
  explicit Error(std::string message) : message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }

  void prepend(const std::string& context) { message_ = context + ": " + message_; }

private:
  std::string message_;
};

/// Parameter outside the [0,1] domain.
class DomainError : public Error {
  using Error::Error;
};

/// Array dimensions that do not agree (weight nets, control grids).
class ShapeError : public Error {
  using Error::Error;
};

/// Violated data invariant (knot ordering, weights, counts, config ranges).
class ValidationError : public Error {
  using Error::Error;
};

/// Geometrically unusable input: invalid trim maps, degenerate lines or
/// parameterizations, collapsed tangents.
class GeometryError : public Error {
  using Error::Error;
};

class SingularSystemError : public Error {
  using Error::Error;
};

/// An iterative method or the intersection pipeline could not produce a result.
class ConvergenceError : public Error {
  using Error::Error;
};

/// Intersection layouts the decomposition cannot handle (open or
/// non-star-shaped loops).
class TopologyError : public Error {
  using Error::Error;
};

class ParseError : public Error {
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
  using Error::Error;
};

}  // namespace nurbsgeo
