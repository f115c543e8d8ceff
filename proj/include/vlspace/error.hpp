#pragma once

#include <stdexcept>
#include <string>

namespace vls {

enum class ErrorCode {
  Config = 1,       // invalid parameters / preconditions
  Data = 2,         // non-finite or malformed field data
  OutOfDomain = 3,  // requested cube leaves the domain box
  Degenerate = 4,   // rank-deficient or zero-norm input to a geometric solve
  NoConvergence = 5,
  Io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace vls
