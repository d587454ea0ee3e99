#include "mebd/error.hpp"

namespace mebd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadLabel: return "BadLabel";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::EmptyKeepSet: return "EmptyKeepSet";
    case ErrorKind::EmptySubset: return "EmptySubset";
    case ErrorKind::BadK: return "BadK";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::BadPartition: return "BadPartition";
    case ErrorKind::BadLevel: return "BadLevel";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::NoMaximumFound: return "NoMaximumFound";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace mebd
