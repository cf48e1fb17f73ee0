#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carousel {

/// Invalid parameters or an inconsistent run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A simulation or numerical routine produced a non-finite or non-convergent value.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t index = npos)
      : std::runtime_error(what), index_(index) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Step index or stream id attached by the thrower, npos when unknown.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A property guaranteed by construction failed to hold, which points at an implementation bug.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace carousel
