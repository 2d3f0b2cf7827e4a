#include "anibem/error.hpp"

namespace anibem {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::DomainError: return "DomainError";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::OffCurve: return "OffCurve";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::NonFinite: return "NonFinite";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotBracketed: return "NotBracketed";
    case Errc::NoRankLoss: return "NoRankLoss";
    case Errc::OutsideRegion: return "OutsideRegion";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace anibem
