#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dybm {

/// A model or run configuration violates one of its invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input document (checkpoint, run config, series CSV).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite or runaway parameter.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch, std::size_t step)
      : std::runtime_error(what), epoch_(epoch), step_(step) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

}  // namespace dybm
