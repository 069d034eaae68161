#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfm {

// Broad failure class; the CLI maps these onto exit statuses.
enum class ErrorKind { validation, io };

enum class ErrorCode {
  io_failure,
  unsupported_format,
  non_grayscale,
  invalid_argument,
  dimension_mismatch,
  no_pairs,
  empty_matrix,
  empty_collection,
  missing_class,
  degenerate_classes,
  malformed_file,
};

std::string_view to_string(ErrorCode code) noexcept;
ErrorKind kind_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rfm
