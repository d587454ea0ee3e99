#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mebd {

enum class ErrorKind {
  NotHermitian,
  NonFinite,
  ConvergenceFailure,
  DimensionMismatch,
  BadLabel,
  NotNormalized,
  EmptyKeepSet,
  EmptySubset,
  BadK,
  BadSize,
  BadPartition,
  BadLevel,
  GridTooLarge,
  NoMaximumFound,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mebd
