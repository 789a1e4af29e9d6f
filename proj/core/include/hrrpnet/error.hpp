#pragma once

#include <stdexcept>
#include <string>

namespace hrrpnet {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    Size,
    Domain,
    Argument,
    Stitch,
    Shape,
    Calibration,
    Estimation,
    Normalization,
    Config,
    Io,
    Numerical,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define HRRPNET_DEFINE_ERROR(Name, Kind)                                       \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

HRRPNET_DEFINE_ERROR(SizeError, Size)
HRRPNET_DEFINE_ERROR(DomainError, Domain)
HRRPNET_DEFINE_ERROR(ArgumentError, Argument)
HRRPNET_DEFINE_ERROR(StitchError, Stitch)
HRRPNET_DEFINE_ERROR(ShapeError, Shape)
HRRPNET_DEFINE_ERROR(CalibrationError, Calibration)
HRRPNET_DEFINE_ERROR(EstimationError, Estimation)
HRRPNET_DEFINE_ERROR(NormalizationError, Normalization)
HRRPNET_DEFINE_ERROR(ConfigError, Config)
HRRPNET_DEFINE_ERROR(IoError, Io)
HRRPNET_DEFINE_ERROR(NumericalError, Numerical)

#undef HRRPNET_DEFINE_ERROR

}  // namespace hrrpnet
