#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace decoh {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, out-of-range parameters, sizes above the configured limits.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: non-convergence, zero norm, excessive truncation.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::optional<double> residual = std::nullopt)
      : Error(what), residual_(residual) {}

  std::optional<double> residual() const noexcept { return residual_; }

 private:
  std::optional<double> residual_;
};

}  // namespace decoh
