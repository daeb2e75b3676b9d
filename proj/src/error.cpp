#include "smtlab/error.hpp"

namespace smtlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::domain: return "domain";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::resource: return "resource";
    case ErrorCode::mesh_quality: return "mesh_quality";
    case ErrorCode::solver: return "solver";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::fit_window: return "fit_window";
    case ErrorCode::accuracy: return "accuracy";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::config: return "config";
    case ErrorCode::saturation: return "saturation";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace smtlab
