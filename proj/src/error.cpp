#include "pomp/error.hpp"

namespace pomp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::missing_field: return "missing-field";
    case ErrorKind::missing_file: return "missing-file";
    case ErrorKind::io: return "io";
    case ErrorKind::schema_version: return "schema-version";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::load: return "load";
    case ErrorKind::pool_exhausted: return "pool-exhausted";
    case ErrorKind::timeout: return "timeout";
    case ErrorKind::rate_limited: return "rate-limited";
    case ErrorKind::transport: return "transport";
    case ErrorKind::malformed_response: return "malformed-response";
    case ErrorKind::empty_output: return "empty-output";
    case ErrorKind::cache_miss: return "cache-miss";
  }
  return "unknown";
}

bool is_retriable(ErrorKind kind) {
  return kind == ErrorKind::timeout || kind == ErrorKind::rate_limited ||
         kind == ErrorKind::transport;
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_config:
      return ErrorCategory::config;
    case ErrorKind::invalid_input:
    case ErrorKind::missing_field:
    case ErrorKind::missing_file:
    case ErrorKind::io:
    case ErrorKind::schema_version:
    case ErrorKind::invariant_violation:
    case ErrorKind::load:
    case ErrorKind::pool_exhausted:
      return ErrorCategory::data;
    case ErrorKind::timeout:
    case ErrorKind::rate_limited:
    case ErrorKind::transport:
    case ErrorKind::malformed_response:
    case ErrorKind::empty_output:
    case ErrorKind::cache_miss:
      return ErrorCategory::provider;
  }
  return ErrorCategory::internal;
}

}  // namespace pomp
