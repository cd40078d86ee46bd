#pragma once

#include "specauction/instance.hpp"
#include "specauction/rng.hpp"

namespace specauction {

// Nondecreasing value curve with values[0] = 0; concave with probability one
// half, otherwise an arbitrary monotone staircase.
SymmetricValuation random_symmetric_valuation(int k, const Rng& rng);

// One to three weighted matroid rank terms drawn over the three descriptor
// classes.
MrsValuation random_mrs_valuation(int k, const Rng& rng);

struct RandomInstanceOptions {
    int n = 6;
    int k = 3;
    bool weighted = false;
    bool mrs = false;              // MRS valuations instead of symmetric ones
    double edge_probability = 0.5;
    double weight_scale = 0.6;     // weighted graphs: w(u, v) ~ U[0, scale]
};

// Erdos-Renyi style conflict graph with identity ordering and random
// valuations; rho comes from rho_of_ordering so the instance validates.
Instance random_instance(const RandomInstanceOptions& opts, const Rng& rng);

}  // namespace specauction
