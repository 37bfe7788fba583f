#pragma once

#include <stdexcept>
#include <string>

namespace kgeo {

/// Input violates a documented precondition (bad resolution, mismatched
/// surfaces, non-finite data, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// A spectral operation would push energy past the alias-safe band, or the
/// grid cannot represent the requested derivative.
class AliasingError : public std::runtime_error {
 public:
  explicit AliasingError(const std::string& what) : std::runtime_error(what) {}
};

/// A metric coefficient that must be positive is not. Thrown only by
/// operations whose contract is an error; constructions that may fail return
/// a PositivityFailure value instead.
class PositivityError : public std::runtime_error {
 public:
  explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

/// Bidegree series fed to a ray extraction is not S^1-invariant.
class NotInvariantError : public std::runtime_error {
 public:
  explicit NotInvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario configuration is malformed (unknown key, wrong type, bad range).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kgeo
