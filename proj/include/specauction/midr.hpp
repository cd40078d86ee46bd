#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "specauction/decomposition.hpp"
#include "specauction/instance.hpp"
#include "specauction/rng.hpp"

namespace specauction {

// Channel-form fractional point: x[channel_var(v, j, k)] is user v's weight
// on channel j.
inline int channel_var(int v, int j, int k) { return v * k + j; }

struct MidrOptions {
    double tol_gap = 1e-9;  // certified first-order gap, relative to max(1, |obj|)
    double mu = -1.0;       // negative -> min(2^-nk, 2^-40)
    double alpha = 0.0;     // nonpositive -> class default
    uint64_t oracle_seed = 0x5eedULL;
};

double default_midr_mu(int n, int k);

// Lottery scale the mechanism commits to before seeing reports: rho_eff on
// unweighted graphs, 4 rho_eff ceil(log2 n) on weighted ones.
double default_midr_alpha(const Instance& inst);

// q_{v,j} = 1 - exp(-x_{v,j} / (2 alpha)), the allocation probability the
// exponential rounding realizes.
std::vector<double> rounding_probabilities(const std::vector<double>& x, double alpha);

// Expected true value of user v under the whole pipeline (independent
// per-channel rounding followed by the mu-perturbation) at point x.
double pipeline_user_value(const Instance& inst, const std::vector<double>& x, double alpha,
                           double mu, int v);

// Perturbed objective: sum of pipeline values, optionally weighted per user
// (VCG probes drop one user by zeroing its weight; the perturbation term's
// q-sum always spans everyone since it is a property of x alone).
double perturbed_welfare(const Instance& inst, const std::vector<double>& x, double alpha,
                         double mu, const std::vector<double>* user_weight = nullptr);

struct ConvexSolution {
    std::vector<double> x;  // n*k channel form
    double objective = 0.0;
    double fw_gap = 0.0;  // certified: optimum <= objective + fw_gap
    int newton_steps = 0;
};

// Log-barrier path following over the channel-form polytope. The returned
// first-order gap is certified by exact per-channel LP solves, so the
// optimizer's internals never need to be trusted.
ConvexSolution maximize_expected_welfare(const Instance& inst, const MidrOptions& opts = {},
                                         const std::vector<double>* user_weight = nullptr);

// Per-channel decompositions of x at the lottery alpha. Doubling is disabled
// here: the retention step divides by x / alpha, so the decomposition scale
// must be the lottery scale.
struct RoundingPlan {
    int n = 0;
    int k = 0;
    double alpha = 0.0;
    std::vector<double> x;
    std::vector<Decomposition> per_channel;
};

RoundingPlan make_rounding_plan(const Instance& inst, const std::vector<double>& x, double alpha,
                                uint64_t oracle_seed);

// One sample with P[v gets j] = q_{v,j}(x), channels independent: draw a set
// from each channel's decomposition, then retain each tentative winner with
// probability q / (x / alpha).
Allocation round_exact(const RoundingPlan& plan, const Rng& rng);

// Lazy dyadic simulation state. estimate(t) must stay within
// delta_t = 1 / (n 2^{t+1}) of one fixed point of the polytope, in the sup
// norm; detected contract breaches raise simulation_error. Caches are filled
// lazily and never affect results.
struct SimulationContext {
    Instance inst;
    double alpha = 0.0;
    int level_cap = 64;
    std::function<std::vector<double>(int)> estimate;
    uint64_t oracle_seed = 0;
    std::map<int, std::vector<double>> y_levels;
    std::map<int, Decomposition> level_one;  // keyed by channel
};

// Default context: solves the perturbed objective once and estimates every
// level with that cached point.
SimulationContext make_simulation_context(const Instance& inst, const MidrOptions& opts = {});
SimulationContext make_simulation_context(const Instance& inst, const MidrOptions& opts,
                                          std::function<std::vector<double>(int)> estimate);

// Samples the same per-channel distribution as round_exact while only ever
// querying the estimator at the dyadic level drawn for each channel.
Allocation simulate_midr(SimulationContext& ctx, const Rng& rng);

// Identity with probability 1 - mu; otherwise clear everything and, with
// probability beta = (allocated share of the input), hand one uniform user
// the full spectrum.
Allocation perturb_midr(const Instance& inst, const Allocation& alloc, double mu, const Rng& rng);

}  // namespace specauction
