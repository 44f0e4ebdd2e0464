#include "ttade/common.hpp"

namespace ttade {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NonGenericRays: return "NonGenericRays";
    case ErrorKind::NoAdmissibleDelta: return "NoAdmissibleDelta";
    case ErrorKind::RayCollision: return "RayCollision";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotUnitriangular: return "NotUnitriangular";
    case ErrorKind::InvalidRank: return "InvalidRank";
    case ErrorKind::ContourViolation: return "ContourViolation";
    case ErrorKind::ModulusViolation: return "ModulusViolation";
    case ErrorKind::CertificationMissing: return "CertificationMissing";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::NearContour: return "NearContour";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::StiffnessFailure: return "StiffnessFailure";
    case ErrorKind::StructureViolation: return "StructureViolation";
  }
  return "Unknown";
}

}  // namespace ttade
