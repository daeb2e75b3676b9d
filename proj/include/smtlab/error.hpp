#pragma once

#include <stdexcept>
#include <string>

namespace smtlab {

enum class ErrorCode : int {
  ok = 0,
  domain = 1,          // argument outside its mathematical domain
  geometry = 2,        // geometric precondition violated
  resource = 3,        // configured budget exceeded
  mesh_quality = 4,    // degenerate triangle
  solver = 5,          // linear or nonlinear solve failed
  degenerate_input = 6,
  fit_window = 7,
  accuracy = 8,
  parameter = 9,
  config = 10,
  saturation = 11,
  io = 12,
  internal = 99,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace smtlab
