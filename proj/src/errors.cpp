#include "populace/errors.hpp"

namespace populace {

const char* to_string(ExecutionFailure f) {
  switch (f) {
    case ExecutionFailure::NoScript: return "NoScript";
    case ExecutionFailure::Syntax: return "SyntaxError";
    case ExecutionFailure::Runtime: return "RuntimeError";
    case ExecutionFailure::Grounding: return "GroundingError";
  }
  return "?";
}

}  // namespace populace
