#pragma once

#include <utility>
#include <vector>

#include "specauction/instance.hpp"
#include "specauction/lp.hpp"
#include "specauction/rng.hpp"

namespace specauction {

// Sampling denominators need a strictly positive scale even when the claimed
// rho is 0 (edgeless graphs).
inline double effective_rho(double rho) { return rho > 0.25 ? rho : 0.25; }

struct RoundDiagnostics {
    int rounds = 0;
    // Smallest per-round ratio of admitted demand to pending demand. The
    // contention analysis promises > 1/2 every round.
    double min_claim_ratio = 1.0;
    // Largest per-channel incoming weight into an allocated user across all
    // rounds: directed w (the feasibility quantity) and symmetric wbar.
    double max_channel_incoming = 0.0;
    double max_channel_incoming_sym = 0.0;
};

// Splits a count-form point at the demand threshold: the first half keeps
// entries with i <= threshold, the second the rest. Positions are preserved.
std::pair<std::vector<double>, std::vector<double>> split_counts(const std::vector<double>& x,
                                                                 int n, int k, int threshold);

// Draws d_v = i with probability x_{v,i} / (denom * rho_eff), leftover mass
// giving d_v = 0. One keyed draw per user, so the result is independent of
// evaluation order.
std::vector<int> sample_demands(const std::vector<double>& x, int n, int k, double rho_eff,
                                double denom, const Rng& rng);

// Forward scan in pi order: d_v is zeroed when the already-scanned demands
// press on v with 32 * sum_{pi(u)<pi(v)} d_u * wbar(u,v) >= k. The comparison
// is exact; earlier zeroed users no longer contribute.
void apply_zeroing(const ConflictGraph& g, const Ordering& ordering, std::vector<int>& d, int k);

// Randomized contention resolution for small demands (0 < d_v <= floor(k/8)
// and the zeroing predicate already satisfied; both are validated). Each
// round admits users in decreasing pi under the k/32 pressure test, lets the
// admitted claim channels independently with probability 8 d_u / k, and
// satisfies users whose undisturbed claims cover their demand. Returns the
// single round maximizing the sum of round_value over its satisfied users.
// Exceeding the round budget raises rounding_error.
Allocation allocate_small(const ConflictGraph& g, const Ordering& ordering,
                          const std::vector<int>& d, int k, const std::vector<double>& round_value,
                          const Rng& rng, RoundDiagnostics* diag = nullptr);

// Deterministic counterpart for large demands (d_v = 0 or 8 d_v >= k): every
// admitted user takes its first d_v channels, so each round empties its
// admitted set and the loop ends after at most n rounds.
Allocation allocate_large(const ConflictGraph& g, const Ordering& ordering,
                          const std::vector<int>& d, int k, const std::vector<double>& round_value,
                          RoundDiagnostics* diag = nullptr);

// Unweighted rounding: split at floor(k/2), per half draw demands at
// denominator 4 and pack the lowest free channels in pi order (a channel is
// free when no earlier neighbor holds it); users whose free set is too small
// get nothing. Returns the better half by realized welfare.
Allocation round_unweighted(const Instance& inst, const CountLpSolution& frac, const Rng& rng);

// Weighted rounding: split at floor(k/8), draw demands at denominator 64,
// zero overloaded users, then resolve the small half randomly and the large
// half deterministically. Returns the better half by realized welfare.
Allocation round_weighted(const Instance& inst, const CountLpSolution& frac, const Rng& rng,
                          RoundDiagnostics* diag_small = nullptr,
                          RoundDiagnostics* diag_large = nullptr);

}  // namespace specauction
