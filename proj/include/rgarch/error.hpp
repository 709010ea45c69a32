#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgarch {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
    NonPositiveParameter,
    NonStationary,
    DimensionMismatch,
    UnsupportedSpec,
    NonPositiveVariance,
    DomainError,
    NonFiniteInput,
    SingularInformation,
    NonFiniteStep,
    InitFailed,
    OptimFailed,
    DegenerateSeries,
    ExplosiveBeta,
    InsufficientReplicates,
    TooManyFailedReplicates,
    InvalidDf,
    InfiniteFourthMoment,
    QuadratureNotConverged,
    AllReplicationsFailed,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rgarch
