#pragma once

#include <stdexcept>
#include <string>

namespace kphom {

enum class ErrorKind {
  empty_phrase,
  empty_reference,
  empty_original,
  empty_document,
  empty_corpus,
  insufficient_data,
  constant_series,
  parse_error,
  duplicate_id,
  duplicate_prediction,
  missing_field,
  unresolved_doc_id,
  missing_references,
  no_references,
  no_overlap,
  transport_error,
  rate_limited,
  malformed_response,
  io_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Validation failures exit 1, I/O failures exit 2.
  int exit_code() const {
    switch (kind_) {
      case ErrorKind::io_error:
      case ErrorKind::transport_error:
      case ErrorKind::rate_limited:
        return 2;
      default:
        return 1;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace kphom
