#include "specauction/rounding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>

#include "specauction/errors.hpp"

namespace specauction {

namespace {

constexpr uint64_t kPhaseDemand = 11;
constexpr uint64_t kPhaseClaims = 12;
constexpr uint64_t kPhaseHalfTwo = 21;

ChannelSet lowest_bits(ChannelSet mask, int count) {
    ChannelSet out = 0;
    for (int j = 0; count > 0 && j < 32; ++j) {
        const ChannelSet bit = ChannelSet{1} << j;
        if (mask & bit) {
            out |= bit;
            --count;
        }
    }
    return out;
}

void check_demand_shape(const ConflictGraph& g, const Ordering& ordering,
                        const std::vector<int>& d, int k,
                        const std::vector<double>& round_value) {
    const int n = g.n();
    if (static_cast<int>(d.size()) != n) throw size_error("demand vector length mismatch");
    if (static_cast<int>(round_value.size()) != n)
        throw size_error("round value vector length mismatch");
    if (static_cast<int>(ordering.position.size()) != n)
        throw size_error("ordering length mismatch");
    for (int v = 0; v < n; ++v)
        if (d[v] < 0 || d[v] > k) throw domain_error("demand outside [0, k]");
}

// Both allocators assume the zeroing predicate already holds for every
// surviving user; violating it breaks the contention analysis, so reject.
void check_zeroing_applied(const ConflictGraph& g, const Ordering& ordering,
                           const std::vector<int>& d, int k) {
    const int n = g.n();
    for (int v = 0; v < n; ++v) {
        if (d[v] == 0) continue;
        double pressure = 0.0;
        for (int u = 0; u < n; ++u)
            if (u != v && ordering.position[u] < ordering.position[v] && d[u] > 0)
                pressure += d[u] * symmetric_weight(g, u, v);
        if (32.0 * pressure >= static_cast<double>(k))
            throw domain_error("zeroing predicate violated for a surviving demand");
    }
}

std::vector<int> decreasing_pi(const Ordering& ordering) {
    std::vector<int> order = ordering.by_rank();
    std::reverse(order.begin(), order.end());
    return order;
}

double pending_demand(const std::vector<int>& d, const std::vector<char>& active) {
    double total = 0.0;
    for (size_t v = 0; v < d.size(); ++v)
        if (active[v]) total += d[v];
    return total;
}

// Admission scan shared by both allocators: decreasing pi, pressure test
// 32 * sum_{v admitted} d_v * wbar(u,v) < k, compared exactly.
std::vector<int> admit_round(const ConflictGraph& g, const std::vector<int>& scan_order,
                             const std::vector<int>& d, int k, const std::vector<char>& active) {
    std::vector<int> admitted;
    for (int u : scan_order) {
        if (!active[u]) continue;
        double pressure = 0.0;
        for (int v : admitted) pressure += d[v] * symmetric_weight(g, u, v);
        if (32.0 * pressure < static_cast<double>(k)) admitted.push_back(u);
    }
    return admitted;
}

void record_claim_ratio(RoundDiagnostics* diag, const std::vector<int>& d,
                        const std::vector<char>& active, const std::vector<int>& admitted) {
    if (!diag) return;
    const double pending = pending_demand(d, active);
    if (pending <= 0.0) return;
    double claimed = 0.0;
    for (int u : admitted) claimed += d[u];
    diag->min_claim_ratio = std::min(diag->min_claim_ratio, claimed / pending);
}

void record_incoming(const ConflictGraph& g, RoundDiagnostics* diag, int k,
                     const std::vector<ChannelSet>& sets, const std::vector<int>& holders) {
    if (!diag) return;
    for (int v : holders) {
        for (int j = 0; j < k; ++j) {
            if (!(sets[v] >> j & 1u)) continue;
            double in_dir = 0.0;
            double in_sym = 0.0;
            for (int u : holders) {
                if (u == v || !(sets[u] >> j & 1u)) continue;
                in_dir += g.weight(u, v);
                in_sym += symmetric_weight(g, u, v);
            }
            diag->max_channel_incoming = std::max(diag->max_channel_incoming, in_dir);
            diag->max_channel_incoming_sym = std::max(diag->max_channel_incoming_sym, in_sym);
        }
    }
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> split_counts(const std::vector<double>& x,
                                                                 int n, int k, int threshold) {
    if (static_cast<int>(x.size()) != n * k) throw size_error("count point length mismatch");
    std::vector<double> low(x.size(), 0.0);
    std::vector<double> high(x.size(), 0.0);
    for (int v = 0; v < n; ++v)
        for (int i = 1; i <= k; ++i) {
            const int idx = count_var(v, i, k);
            (i <= threshold ? low : high)[idx] = x[idx];
        }
    return {std::move(low), std::move(high)};
}

std::vector<int> sample_demands(const std::vector<double>& x, int n, int k, double rho_eff,
                                double denom, const Rng& rng) {
    if (static_cast<int>(x.size()) != n * k) throw size_error("count point length mismatch");
    if (!(rho_eff > 0.0) || !(denom > 0.0)) throw parameter_error("nonpositive sampling scale");
    std::vector<int> d(n, 0);
    for (int v = 0; v < n; ++v) {
        double total = 0.0;
        for (int i = 1; i <= k; ++i) {
            const double p = std::max(x[count_var(v, i, k)], 0.0) / (denom * rho_eff);
            if (p > 1.0 + 1e-6) throw parameter_error("demand probability above 1");
            total += p;
        }
        if (total > 1.0 + 1e-6) throw parameter_error("demand probabilities exceed 1");
        const double u = rng.fork(v).next_double();
        double cum = 0.0;
        for (int i = 1; i <= k; ++i) {
            cum += std::max(x[count_var(v, i, k)], 0.0) / (denom * rho_eff);
            if (u < cum) {
                d[v] = i;
                break;
            }
        }
    }
    return d;
}

void apply_zeroing(const ConflictGraph& g, const Ordering& ordering, std::vector<int>& d, int k) {
    const int n = g.n();
    if (static_cast<int>(d.size()) != n) throw size_error("demand vector length mismatch");
    for (int v : ordering.by_rank()) {
        if (d[v] == 0) continue;
        double pressure = 0.0;
        for (int u = 0; u < n; ++u)
            if (u != v && ordering.position[u] < ordering.position[v] && d[u] > 0)
                pressure += d[u] * symmetric_weight(g, u, v);
        if (32.0 * pressure >= static_cast<double>(k)) d[v] = 0;
    }
}

Allocation allocate_small(const ConflictGraph& g, const Ordering& ordering,
                          const std::vector<int>& d, int k, const std::vector<double>& round_value,
                          const Rng& rng, RoundDiagnostics* diag) {
    const int n = g.n();
    check_demand_shape(g, ordering, d, k, round_value);
    for (int v = 0; v < n; ++v)
        if (d[v] > k / 8) throw domain_error("small-demand allocator requires d_v <= k/8");
    check_zeroing_applied(g, ordering, d, k);

    Allocation best = empty_allocation(n);
    double best_value = 0.0;
    std::vector<char> active(n, 0);
    bool any_active = false;
    for (int v = 0; v < n; ++v) {
        active[v] = d[v] > 0;
        any_active = any_active || active[v];
    }
    if (!any_active || k == 0) return best;

    const std::vector<int> scan_order = decreasing_pi(ordering);
    // Demand mass halves per round in expectation; 4 ln(nk) / ln(4/3) rounds
    // leave only a vanishing failure probability, so beyond that we fail
    // loudly instead of spinning.
    const int round_cap =
        std::max(4, static_cast<int>(std::ceil(
                        4.0 * std::log(static_cast<double>(n) * k) / std::log(4.0 / 3.0))));
    const ChannelSet full = (ChannelSet{1} << k) - 1;

    int rounds = 0;
    while (any_active) {
        if (rounds >= round_cap)
            throw rounding_error("contention resolution exceeded its round budget");
        const std::vector<int> admitted = admit_round(g, scan_order, d, k, active);
        record_claim_ratio(diag, d, active, admitted);

        std::vector<ChannelSet> claims(n, 0);
        for (int u : admitted) {
            Rng stream = rng.fork(kPhaseClaims, static_cast<uint64_t>(rounds)).fork(u);
            const double p = 8.0 * d[u] / k;
            ChannelSet mask = 0;
            for (int j = 0; j < k; ++j)
                if (stream.bernoulli(p)) mask |= ChannelSet{1} << j;
            claims[u] = mask & full;
        }

        Allocation round_alloc = empty_allocation(n);
        double round_total = 0.0;
        std::vector<int> satisfied;
        for (int v : admitted) {
            ChannelSet good = 0;
            for (int j = 0; j < k; ++j) {
                if (!(claims[v] >> j & 1u)) continue;
                double incoming = 0.0;
                for (int u : admitted)
                    if (u != v && (claims[u] >> j & 1u)) incoming += symmetric_weight(g, u, v);
                if (incoming < 1.0) good |= ChannelSet{1} << j;
            }
            if (std::popcount(good) >= d[v]) {
                round_alloc.sets[v] = lowest_bits(good, d[v]);
                satisfied.push_back(v);
                round_total += round_value[v];
            }
        }
        record_incoming(g, diag, k, round_alloc.sets, satisfied);

        if (round_total > best_value) {
            best_value = round_total;
            best = round_alloc;
        }
        for (int v : satisfied) active[v] = 0;
        any_active = false;
        for (int v = 0; v < n; ++v) any_active = any_active || active[v];
        ++rounds;
    }
    if (diag) diag->rounds = rounds;
    return best;
}

Allocation allocate_large(const ConflictGraph& g, const Ordering& ordering,
                          const std::vector<int>& d, int k, const std::vector<double>& round_value,
                          RoundDiagnostics* diag) {
    const int n = g.n();
    check_demand_shape(g, ordering, d, k, round_value);
    for (int v = 0; v < n; ++v)
        if (d[v] != 0 && 8 * d[v] < k)
            throw domain_error("large-demand allocator requires 8 d_v >= k");
    check_zeroing_applied(g, ordering, d, k);

    Allocation best = empty_allocation(n);
    double best_value = 0.0;
    std::vector<char> active(n, 0);
    bool any_active = false;
    for (int v = 0; v < n; ++v) {
        active[v] = d[v] > 0;
        any_active = any_active || active[v];
    }
    if (!any_active || k == 0) return best;

    const std::vector<int> scan_order = decreasing_pi(ordering);
    int rounds = 0;
    while (any_active) {
        const std::vector<int> admitted = admit_round(g, scan_order, d, k, active);
        record_claim_ratio(diag, d, active, admitted);

        Allocation round_alloc = empty_allocation(n);
        double round_total = 0.0;
        for (int u : admitted) {
            round_alloc.sets[u] = (ChannelSet{1} << d[u]) - 1;
            round_total += round_value[u];
        }
        record_incoming(g, diag, k, round_alloc.sets, admitted);

        if (round_total > best_value) {
            best_value = round_total;
            best = round_alloc;
        }
        for (int u : admitted) active[u] = 0;
        any_active = false;
        for (int v = 0; v < n; ++v) any_active = any_active || active[v];
        ++rounds;
    }
    if (diag) diag->rounds = rounds;
    return best;
}

Allocation round_unweighted(const Instance& inst, const CountLpSolution& frac, const Rng& rng) {
    if (!inst.graph.graph.unweighted())
        throw mode_error("unweighted rounding requires an unweighted graph");
    if (!all_symmetric(inst)) throw mode_error("count rounding requires symmetric valuations");
    const int n = inst.n();
    const int k = inst.k;
    if (static_cast<int>(frac.x.size()) != n * k) throw size_error("count point length mismatch");
    Allocation best = empty_allocation(n);
    if (k == 0) return best;

    const ConflictGraph& g = inst.graph.graph;
    const Ordering& ordering = inst.graph.ordering;
    const double rho_eff = effective_rho(ordering.rho);
    const ChannelSet full = (ChannelSet{1} << k) - 1;
    auto halves = split_counts(frac.x, n, k, k / 2);

    double best_welfare = 0.0;
    for (int half = 0; half < 2; ++half) {
        const std::vector<double>& part = half == 0 ? halves.first : halves.second;
        const std::vector<int> d =
            sample_demands(part, n, k, rho_eff, 4.0, rng.fork(kPhaseDemand, half));

        Allocation alloc = empty_allocation(n);
        for (int v : ordering.by_rank()) {
            if (d[v] == 0) continue;
            ChannelSet used = 0;
            for (int u : earlier_neighbors(g, ordering, v)) used |= alloc.sets[u];
            const ChannelSet free = full & ~used;
            if (std::popcount(free) >= d[v]) alloc.sets[v] = lowest_bits(free, d[v]);
        }
        const double welfare = allocation_welfare(inst, alloc);
        if (half == 0 || welfare > best_welfare) {
            best_welfare = welfare;
            best = alloc;
        }
    }
    return best;
}

Allocation round_weighted(const Instance& inst, const CountLpSolution& frac, const Rng& rng,
                          RoundDiagnostics* diag_small, RoundDiagnostics* diag_large) {
    if (!all_symmetric(inst)) throw mode_error("count rounding requires symmetric valuations");
    const int n = inst.n();
    const int k = inst.k;
    if (static_cast<int>(frac.x.size()) != n * k) throw size_error("count point length mismatch");
    if (k == 0) return empty_allocation(n);

    const ConflictGraph& g = inst.graph.graph;
    const Ordering& ordering = inst.graph.ordering;
    const double rho_eff = effective_rho(ordering.rho);
    auto halves = split_counts(frac.x, n, k, k / 8);

    auto satisfied_value = [&](const std::vector<int>& d) {
        std::vector<double> rv(n, 0.0);
        for (int v = 0; v < n; ++v)
            if (d[v] > 0) rv[v] = value_count(inst.valuations[v], d[v]);
        return rv;
    };

    std::vector<int> d_small =
        sample_demands(halves.first, n, k, rho_eff, 64.0, rng.fork(kPhaseDemand, 0));
    apply_zeroing(g, ordering, d_small, k);
    const Allocation small = allocate_small(g, ordering, d_small, k, satisfied_value(d_small),
                                            rng.fork(kPhaseClaims), diag_small);

    std::vector<int> d_large =
        sample_demands(halves.second, n, k, rho_eff, 64.0, rng.fork(kPhaseHalfTwo, 0));
    apply_zeroing(g, ordering, d_large, k);
    const Allocation large =
        allocate_large(g, ordering, d_large, k, satisfied_value(d_large), diag_large);

    return allocation_welfare(inst, large) > allocation_welfare(inst, small) ? large : small;
}

}  // namespace specauction
