#pragma once

#include <vector>

#include "specauction/graph.hpp"

namespace specauction {

struct LocalRatioResult {
    VertexSet chosen;
    // Value each vertex carried when the backward pass reached it. Final for
    // every vertex, since later subtractions only hit earlier positions.
    std::vector<double> residuals;
};

// Two-pass local-ratio greedy for max-weight independent set on unweighted
// graphs. Backward pass (decreasing pi): a vertex that is nonpositive at its
// turn is removed and subtracts nothing; otherwise its current value is
// subtracted from every earlier neighbor. Forward pass adds survivors
// greedily. Not bid-monotone.
LocalRatioResult local_ratio_greedy(const ConflictGraph& g, const Ordering& ordering,
                                    const std::vector<double>& bids);

// Bid-monotone prefix greedy: for each distinct bid threshold run the forward
// greedy on the users at or above it, then keep the best prefix solution.
// Ties go to the higher threshold; an all-nonpositive best yields the empty
// set so that zero bidders never win.
VertexSet monotone_greedy(const ConflictGraph& g, const Ordering& ordering,
                          const std::vector<double>& bids);

}  // namespace specauction
