#pragma once

#include <stdexcept>
#include <string>

namespace specauction {

// Error taxonomy shared across modules. CLI maps these onto exit codes:
// usage errors -> 2, instance/algorithm mismatch -> 3, internal failures -> 4.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input exceeds an enumeration or search guard (e.g. k > 20, n > 9).
struct size_error : std::runtime_error {
    explicit size_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation invoked on the wrong instance class (weighted vs unweighted,
// symmetric vs matroid-rank-sum valuations).
struct mode_error : std::runtime_error {
    explicit mode_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric parameter outside its admissible range.
struct parameter_error : std::runtime_error {
    explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

// LP or convex solver failed to certify the requested gap.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Column generation exhausted its alpha budget; message carries the dual witness.
struct decomposition_error : std::runtime_error {
    explicit decomposition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dyadic simulation detected an estimator contract breach.
struct simulation_error : std::runtime_error {
    explicit simulation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Randomized contention resolution exceeded its round budget.
struct rounding_error : std::runtime_error {
    explicit rounding_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace specauction
