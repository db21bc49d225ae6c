#pragma once

#include <stdexcept>
#include <string>

namespace relayq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// channel_models
struct InfiniteQuantileError : Error { using Error::Error; };

// quantizer
struct InvalidRatioError : Error { using Error::Error; };
struct DesignInfeasibleError : Error { using Error::Error; };
struct TooFewLevelsError : Error { using Error::Error; };
struct DegenerateKappaError : Error { using Error::Error; };

struct NoConvergenceError : Error {
    NoConvergenceError(const std::string& what, double residual)
        : Error(what), last_residual(residual) {}
    double last_residual;
};

// loss_eval
struct QuadratureFailureError : Error { using Error::Error; };

// resource_alloc
struct InvalidInputError : Error { using Error::Error; };
struct MissingQuantizerError : Error { using Error::Error; };

// bit_alloc
struct BudgetTooSmallError : Error { using Error::Error; };

// cli_harness
struct SpecValidationError : Error {
    explicit SpecValidationError(const std::string& field_path, const std::string& what)
        : Error(field_path + ": " + what), field(field_path) {}
    std::string field;
};

}  // namespace relayq
