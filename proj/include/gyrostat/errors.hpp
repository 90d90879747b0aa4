#pragma once

#include <stdexcept>
#include <string>

namespace gyrostat {

/// Input matrix failed the skew-symmetry precondition.
struct NotSkewError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Matrix is singular or has non-positive determinant where a rotation was required.
struct DegenerateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A numerical probe or integration step produced NaN/Inf.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration file is missing a field or a field has the wrong type/value.
/// The message carries the offending field path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config error at '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace gyrostat
