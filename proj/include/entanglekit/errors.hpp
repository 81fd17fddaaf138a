#pragma once

#include <stdexcept>
#include <string>

namespace entanglekit {

// Shape or size of an input does not match what the operation expects.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// An input violates a documented precondition (non-Hermitian matrix,
// unnormalized state vector, ...).
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// A vector that must be normalizable is (numerically) zero.
struct NormalizationError : std::invalid_argument {
    explicit NormalizationError(const std::string& what) : std::invalid_argument(what) {}
};

// Rejection sampling ran out of tries; the requested class/purity window is
// too rare under the current generator settings.
struct GenerationExhausted : std::runtime_error {
    explicit GenerationExhausted(const std::string& what) : std::runtime_error(what) {}
};

// Summand calibration could not place the class mean inside the purity band.
// what() carries the mean-purity-vs-k table for diagnosis.
struct CalibrationError : std::runtime_error {
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

// Simulation register would exceed the supported qubit count.
struct CapacityError : std::invalid_argument {
    explicit CapacityError(const std::string& what) : std::invalid_argument(what) {}
};

// A class has too few samples for the requested number of folds.
struct StratificationError : std::invalid_argument {
    explicit StratificationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace entanglekit
