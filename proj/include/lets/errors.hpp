#pragma once

#include <stdexcept>
#include <string>

namespace lets {

enum class ErrorCode {
    InvalidArgument,
    OutOfRange,
    AlreadyQueried,
    DimensionMismatch,
    LengthMismatch,
    TooFewPoints,
    InvalidCounts,
    ZeroVariance,
    EmptyTraining,
    BadHyperparameter,
    BadProbability,
    PoolExhausted,
    InfeasiblePrior,
    BudgetExceedsPool,
    DegenerateJoint,
    SupportMismatch,
    ZeroDenominator,
    IntegrationFailure,
    EmptyCell,
    InvalidState,
    BadSpec,
    ConfigError,
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace lets
