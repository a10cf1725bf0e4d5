#include "rendezvous/errors.hpp"

namespace rendezvous {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::LayerMismatch: return "LayerMismatch";
    case ErrorCode::NoPositiveLeftNullVector: return "NoPositiveLeftNullVector";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

}  // namespace rendezvous
