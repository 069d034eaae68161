#include "rfm/error.hpp"

namespace rfm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::unsupported_format: return "unsupported_format";
    case ErrorCode::non_grayscale: return "non_grayscale";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::no_pairs: return "no_pairs";
    case ErrorCode::empty_matrix: return "empty_matrix";
    case ErrorCode::empty_collection: return "empty_collection";
    case ErrorCode::missing_class: return "missing_class";
    case ErrorCode::degenerate_classes: return "degenerate_classes";
    case ErrorCode::malformed_file: return "malformed_file";
  }
  return "unknown";
}

ErrorKind kind_of(ErrorCode code) noexcept {
  return code == ErrorCode::io_failure ? ErrorKind::io : ErrorKind::validation;
}

}  // namespace rfm
