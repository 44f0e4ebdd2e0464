#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ttade {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
  BadInput,
  DegenerateSpectrum,
  NonGenericRays,
  NoAdmissibleDelta,
  RayCollision,
  IndexOutOfRange,
  NotUnitriangular,
  InvalidRank,
  ContourViolation,
  ModulusViolation,
  CertificationMissing,
  SolveFailure,
  NearContour,
  GridTooCoarse,
  SingularMetric,
  StiffnessFailure,
  StructureViolation,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ttade
