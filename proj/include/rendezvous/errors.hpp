#pragma once

#include <stdexcept>
#include <string>

namespace rendezvous {

enum class ErrorCode {
  SelfLoop,
  NonPositiveWeight,
  DuplicateEdge,
  IndexOutOfRange,
  NoRoot,
  LayerMismatch,
  NoPositiveLeftNullVector,
  NonFiniteState,
  Schema,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  bool is_graph_error() const noexcept {
    return code_ == ErrorCode::SelfLoop || code_ == ErrorCode::NonPositiveWeight ||
           code_ == ErrorCode::DuplicateEdge || code_ == ErrorCode::IndexOutOfRange;
  }

 private:
  ErrorCode code_;
};

}  // namespace rendezvous
