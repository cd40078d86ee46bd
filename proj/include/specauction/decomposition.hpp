#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specauction/instance.hpp"
#include "specauction/rng.hpp"

namespace specauction {

struct DecompositionEntry {
    double lambda = 0.0;
    Allocation outcome;
};

// Convex combination of feasible outcomes whose marginals reproduce a scaled
// fractional point: sum lambda = 1 and the per-row marginals equal x / alpha.
struct Decomposition {
    std::vector<DecompositionEntry> entries;
    double alpha_achieved = 0.0;
};

// Separation oracle for the channel form: given nonnegative per-user weights,
// return a heavy independent set.
using ChannelOracle = std::function<VertexSet(const std::vector<double>&)>;

// Local-ratio greedy oracle; its approximation guarantee relative to the
// single-channel relaxation makes column generation close at alpha = rho on
// unweighted graphs.
ChannelOracle make_greedy_oracle(const ConflictGraph& g, const Ordering& ordering);

// Weighted-graph oracle. On small graphs (n <= exact_limit) it is an exact
// branch-and-bound max-weight independent set, which makes the achieved alpha
// self-certifying. Larger graphs use the randomized filter: sample users with
// probability x_v / (4 rho_eff), drop on backward wbar pressure >= 1/2, then
// enforce incoming w < 1 in a forward pass; the best of many keyed retries is
// returned. Each oracle call advances an internal counter so retries differ
// across invocations while the whole decomposition stays deterministic.
ChannelOracle make_weighted_oracle(const ConflictGraph& g, const Ordering& ordering,
                                   const std::vector<double>& x_col, uint64_t seed,
                                   int exact_limit = 15);

struct DecomposeOptions {
    // Standalone decompositions may double alpha on oracle stalls; mechanisms
    // must not (a report-dependent alpha breaks truthfulness), so they run
    // with doubling disabled and surface decomposition_error instead.
    bool allow_doubling = true;
    int max_doublings = 10;
    double master_tol = 1e-10;
};

// Writes x_col / alpha over independent sets (entries carry k = 1 masks).
// Support never exceeds the number of fractional users plus one.
Decomposition decompose_channel(const ConflictGraph& g, const Ordering& ordering,
                                const std::vector<double>& x_col, double alpha_start,
                                const ChannelOracle& oracle, const DecomposeOptions& opts = {});

// Count-form analogue over whole allocations: the marginal of (v, i) is the
// probability that v receives exactly i channels. Separation enumerates all
// channel assignments when that is cheap and otherwise solves the count
// relaxation under the dual objective and rounds it with several keyed seeds.
Decomposition decompose_count_solution(const Instance& inst, const std::vector<double>& x,
                                       double alpha_start, const Rng& rng,
                                       const DecomposeOptions& opts = {});

struct DecompositionReport {
    bool ok = true;
    double lambda_sum_error = 0.0;
    double max_marginal_error = 0.0;
    std::string detail;
};

// Feasibility of every outcome, lambda a distribution to 1e-9, marginals to
// 1e-7. Off-support rows must carry no mass.
DecompositionReport verify_channel_decomposition(const ConflictGraph& g, const Decomposition& dec,
                                                 const std::vector<double>& x_col, double alpha);

DecompositionReport verify_count_decomposition(const Instance& inst, const Decomposition& dec,
                                               const std::vector<double>& x, double alpha);

}  // namespace specauction
