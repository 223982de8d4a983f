#pragma once

#include <stdexcept>
#include <string>

namespace llab {

// Error categories map onto CLI exit codes: validation -> 2,
// numerical -> 3, io -> 4.
enum class ErrorKind { validation, numerical, io };

struct Error : std::runtime_error {
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  ErrorKind kind;
};

#define LLAB_ERROR_TYPE(Name, Kind)                   \
  struct Name : Error {                               \
    explicit Name(const std::string& msg)             \
        : Error(ErrorKind::Kind, #Name ": " + msg) {} \
  }

LLAB_ERROR_TYPE(InvalidDimension, validation);
LLAB_ERROR_TYPE(InvalidResolution, validation);
LLAB_ERROR_TYPE(ScaleExceedsDomain, validation);
LLAB_ERROR_TYPE(CubeUnresolvable, validation);
LLAB_ERROR_TYPE(GridMismatch, validation);
LLAB_ERROR_TYPE(InvalidParameters, validation);
LLAB_ERROR_TYPE(SiteCountMismatch, validation);
LLAB_ERROR_TYPE(NegativeConstant, validation);
LLAB_ERROR_TYPE(OutOfRange, validation);
LLAB_ERROR_TYPE(TooLargeForDense, validation);
LLAB_ERROR_TYPE(EmptySpectrum, validation);
LLAB_ERROR_TYPE(ConditionViolated, validation);
LLAB_ERROR_TYPE(InsufficientMinima, validation);
LLAB_ERROR_TYPE(NonPositiveCurve, validation);
LLAB_ERROR_TYPE(ConfigError, validation);

LLAB_ERROR_TYPE(SingularOperator, numerical);
LLAB_ERROR_TYPE(NotConverged, numerical);
LLAB_ERROR_TYPE(NonPositiveLandscape, numerical);
LLAB_ERROR_TYPE(NoFiniteConstant, numerical);

LLAB_ERROR_TYPE(FormatError, io);
LLAB_ERROR_TYPE(ChecksumMismatch, io);
LLAB_ERROR_TYPE(IoError, io);

#undef LLAB_ERROR_TYPE

}  // namespace llab
