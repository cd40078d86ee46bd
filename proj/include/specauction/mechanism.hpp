#pragma once

#include <cstdint>
#include <vector>

#include "specauction/instance.hpp"
#include "specauction/midr.hpp"
#include "specauction/rng.hpp"

namespace specauction {

struct MechanismOutcome {
    Allocation allocation;
    std::vector<double> payments;
    double realized_welfare = 0.0;
    double fractional_optimum = 0.0;  // benchmark the guarantee is stated against
    double alpha = 0.0;               // committed lottery scale
    nlohmann::json diagnostics = nlohmann::json::object();
};

// Exact optimal welfare over deterministic feasible allocations, by
// enumerating tuples of maximal independent channel-winner sets (value
// monotonicity makes maximal sets sufficient). Guarded by an enumeration
// budget; size_error past it.
double brute_force_optimum(const Instance& inst);

struct LaviSwamyOptions {
    double tol = 1e-9;              // LP certificate tolerance
    uint64_t oracle_seed = 0x5eedULL;
};

// Scale the mechanism commits to before seeing reports. Report-independent
// by construction: it only reads the graph, the ordering, and k.
double lavi_swamy_alpha(const Instance& inst);

// Scaled-VCG auction for symmetric valuations: count-form LP, fractional VCG
// prices, convex decomposition of x/alpha over integral allocations, one
// sampled allocation, payments scaled by realized value share.
MechanismOutcome lavi_swamy_mechanism(const Instance& inst, const Rng& rng,
                                      const LaviSwamyOptions& opts = {});

// Maximal-in-distributional-range auction: optimize the perturbed pipeline
// objective over the channel-form polytope, round exactly, perturb, and
// charge VCG prices in expectation space.
MechanismOutcome midr_mechanism(const Instance& inst, const Rng& rng,
                                const MidrOptions& opts = {});

enum class MechanismKind { lavi_swamy, midr };

struct TruthfulnessReport {
    double min_margin = 0.0;  // min over trials of E[u | truth] - E[u | lie]
    int worst_user = -1;
    nlohmann::json detail = nlohmann::json::object();
};

// Exact interim-utility comparison: each trial replaces one user's report
// with a random valuation and recomputes the mechanism's expected utility for
// that user in closed form (LP values for the scaled-VCG auction, certified
// convex optima for the MIDR one). No sampling noise enters the margins.
TruthfulnessReport truthfulness_probe(const Instance& inst, MechanismKind kind, int trials,
                                      const Rng& rng, double tol = 1e-9);

struct MonotonicityReport {
    bool monotone = true;
    int user = -1;
    double win_bid = 0.0;   // witness pair when !monotone: wins here...
    double lose_bid = 0.0;  // ...but loses at this strictly higher bid
    nlohmann::json detail = nlohmann::json::object();
};

// Sweeps one user's bid over a grid (ascending) with everyone else fixed and
// looks for a win followed by a loss at a higher bid.
MonotonicityReport monotonicity_probe(const ConflictGraph& g, const Ordering& ordering,
                                      const std::vector<double>& bids, int user,
                                      const std::vector<double>& grid, bool use_local_ratio);

}  // namespace specauction
