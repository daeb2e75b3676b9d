#pragma once

#include <stdexcept>
#include <string>

#include "smtlab/smtlab.h"

namespace cli {

// A failed library call; carries the status and the library's message unchanged.
struct ModuleError : std::runtime_error {
  smtlab_status status;
  ModuleError(smtlab_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

inline void check(smtlab_status s) {
  if (s != SMTLAB_OK) throw ModuleError(s, smtlab_last_error());
}

template <class T, void (*Free)(T*)>
class Handle {
 public:
  Handle() = default;
  Handle(Handle&& o) noexcept : p_(o.p_) { o.p_ = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      Free(p_);
      p_ = o.p_;
      o.p_ = nullptr;
    }
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p_); }
  T** out() { return &p_; }
  T* get() const { return p_; }
  operator T*() const { return p_; }

 private:
  T* p_ = nullptr;
};

using Space = Handle<smtlab_space, smtlab_space_free>;
using Field = Handle<smtlab_field, smtlab_field_free>;
using Green = Handle<smtlab_green, smtlab_green_free>;
using Extremal = Handle<smtlab_extremal, smtlab_extremal_free>;

inline std::string take_string(char* s) {
  std::string out = s ? s : "";
  smtlab_string_free(s);
  return out;
}

}  // namespace cli
