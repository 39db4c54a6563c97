#pragma once

#include <stdexcept>
#include <string>

namespace hbop {

enum class ErrorCode {
  UnreadableFile,
  BadFormat,
  EmptyMask,
  MultipleComponents,
  DisconnectedGraph,
  NotInterior,
  DegreeTwoInTree,
  Irreducible,
  MismatchedD,
  ZeroSelfKernel,
  EmptyBag,
  DegenerateModel,
  ZeroDenominator,
  NonConvergence,
  SingleClass,
  BadArgument,
};

const char* to_string(ErrorCode code);

/// Single exception type; the code tells callers which contract was violated.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hbop
