#include "superres/error.hpp"

namespace superres {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::DegenerateSignal: return "degenerate signal";
    case ErrorKind::Contiguity: return "contiguity error";
    case ErrorKind::Cardinality: return "cardinality error";
    case ErrorKind::DegenerateMetric: return "degenerate metric";
    case ErrorKind::UnderResolution: return "under-resolution";
    case ErrorKind::NumericalDegeneracy: return "numerical degeneracy";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace superres
