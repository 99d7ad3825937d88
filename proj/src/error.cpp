#include "fdsim/error.hpp"

namespace fdsim {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::resource: return "resource";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::argument: return "argument";
    case ErrorKind::config: return "config";
    case ErrorKind::structural: return "structural";
    case ErrorKind::contract: return "contract";
    case ErrorKind::optimizer: return "optimizer";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace fdsim
