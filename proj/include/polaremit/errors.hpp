#pragma once

#include <stdexcept>
#include <string>

namespace polaremit {

/// Base class for everything thrown by the library.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- model validation ---
struct ValidationError : SimulationError {
    using SimulationError::SimulationError;
};
struct NonPositiveGamma : ValidationError {
    using ValidationError::ValidationError;
};
struct NegativeRabi : ValidationError {
    using ValidationError::ValidationError;
};
struct NegativeSqueezing : ValidationError {
    using ValidationError::ValidationError;
};
struct CarrierMismatch : ValidationError {
    using ValidationError::ValidationError;
};

// --- linear algebra / convergence ---
struct SingularSystem : SimulationError {
    using SimulationError::SimulationError;
};
struct NoConvergence : SimulationError {
    using SimulationError::SimulationError;
};

// --- time-domain integration ---
struct StepTooLarge : SimulationError {
    using SimulationError::SimulationError;
};
struct NotSettled : SimulationError {
    using SimulationError::SimulationError;
};
struct TailTooShort : SimulationError {
    using SimulationError::SimulationError;
};

// --- peak analysis ---
struct NoPeak : SimulationError {
    using SimulationError::SimulationError;
};
struct ClippedPeak : SimulationError {
    using SimulationError::SimulationError;
};

// --- precondition violations on library entry points ---
struct InvalidArgument : SimulationError {
    using SimulationError::SimulationError;
};

// --- configuration / CLI ---
struct ConfigError : SimulationError {
    using SimulationError::SimulationError;
};
struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};
struct UnknownKey : ConfigError {
    using ConfigError::ConfigError;
};
struct InvalidValue : ConfigError {
    using ConfigError::ConfigError;
};

}  // namespace polaremit
