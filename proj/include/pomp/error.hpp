#pragma once

#include <stdexcept>
#include <string>

namespace pomp {

enum class ErrorKind {
  invalid_input,
  invalid_config,
  missing_field,
  missing_file,
  io,
  schema_version,
  invariant_violation,
  load,
  pool_exhausted,
  timeout,
  rate_limited,
  transport,
  malformed_response,
  empty_output,
  cache_miss,
};

const char* to_string(ErrorKind kind);

// Transient provider failures that a retry loop may re-attempt.
bool is_retriable(ErrorKind kind);

// Broad grouping used for CLI exit codes.
enum class ErrorCategory { config, data, provider, internal };

ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool retriable() const noexcept { return is_retriable(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace pomp
