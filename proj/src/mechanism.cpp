#include "specauction/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "specauction/decomposition.hpp"
#include "specauction/errors.hpp"
#include "specauction/generate.hpp"
#include "specauction/greedy.hpp"
#include "specauction/lp.hpp"
#include "specauction/rounding.hpp"

namespace specauction {

namespace {

ChannelSet full_spectrum(int k) {
    return k >= 32 ? ~ChannelSet{0} : (ChannelSet{1} << k) - 1;
}

std::vector<uint32_t> maximal_independent_masks(const ConflictGraph& g) {
    const int n = g.n();
    std::vector<uint32_t> out;
    for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
        if (!is_independent_mask(g, mask)) continue;
        bool maximal = true;
        for (int v = 0; v < n && maximal; ++v)
            if (!(mask >> v & 1) && is_independent_mask(g, mask | (uint32_t{1} << v)))
                maximal = false;
        if (maximal) out.push_back(mask);
    }
    return out;
}

}  // namespace

double brute_force_optimum(const Instance& inst) {
    const int n = inst.n();
    const int k = inst.k;
    if (n > 16) throw size_error("brute force is guarded at 16 users");
    const std::vector<uint32_t> maximal = maximal_independent_masks(inst.graph.graph);
    const size_t m = maximal.size();
    const bool symmetric = all_symmetric(inst);

    // Tuple count: multisets when values only depend on counts, ordered
    // tuples otherwise.
    double tuples = 1.0;
    for (int j = 0; j < k; ++j)
        tuples *= symmetric ? static_cast<double>(m + j) / (j + 1) : static_cast<double>(m);
    if (tuples * n > 4e7) throw size_error("brute force enumeration budget exceeded");

    std::vector<int> counts(n, 0);
    std::vector<ChannelSet> sets(n, 0);
    double best = 0.0;
    // DFS over channel winner sets; symmetric instances restrict to
    // nondecreasing mask indices since channels are interchangeable there.
    std::function<void(int, size_t)> dfs = [&](int j, size_t lo) {
        if (j == k) {
            double welfare = 0.0;
            for (int v = 0; v < n; ++v)
                welfare += symmetric ? value_count(inst.valuations[v], counts[v])
                                     : value(inst.valuations[v], k, sets[v]);
            best = std::max(best, welfare);
            return;
        }
        for (size_t i = symmetric ? lo : 0; i < m; ++i) {
            const uint32_t mask = maximal[i];
            for (int v = 0; v < n; ++v)
                if (mask >> v & 1) {
                    ++counts[v];
                    sets[v] |= ChannelSet{1} << j;
                }
            dfs(j + 1, i);
            for (int v = 0; v < n; ++v)
                if (mask >> v & 1) {
                    --counts[v];
                    sets[v] &= ~(ChannelSet{1} << j);
                }
        }
    };
    if (m > 0) dfs(0, 0);
    return best;
}

double lavi_swamy_alpha(const Instance& inst) {
    const double rho_eff = effective_rho(inst.graph.ordering.rho);
    if (inst.graph.graph.unweighted()) return 16.0 * rho_eff;
    const int nk = std::max(inst.n() * inst.k, 2);
    const int log_nk = static_cast<int>(std::ceil(std::log2(static_cast<double>(nk))));
    return 128.0 * rho_eff * (log_nk + 2);
}

namespace {

double fractional_user_value(const Instance& inst, const std::vector<double>& x, int v) {
    double out = 0.0;
    for (int i = 1; i <= inst.k; ++i)
        out += value_count(inst.valuations[v], i) * x[count_var(v, i, inst.k)];
    return out;
}

}  // namespace

MechanismOutcome lavi_swamy_mechanism(const Instance& inst, const Rng& rng,
                                      const LaviSwamyOptions& opts) {
    validate_instance(inst);
    if (!all_symmetric(inst))
        throw mode_error("the scaled VCG auction needs symmetric valuations");
    const int n = inst.n();
    const double alpha = lavi_swamy_alpha(inst);

    const CountLpSolution base = solve_count_lp(inst, opts.tol);
    std::vector<double> frac_value(n);
    double frac_total = 0.0;
    for (int v = 0; v < n; ++v) {
        frac_value[v] = fractional_user_value(inst, base.x, v);
        frac_total += frac_value[v];
    }

    // Fractional VCG price: externality against the same relaxation, so
    // prices are nonnegative and individually rational before scaling.
    std::vector<double> price_frac(n);
    for (int v = 0; v < n; ++v) {
        std::vector<double> scale(n, 1.0);
        scale[v] = 0.0;
        const CountLpSolution minus = solve_count_lp(inst, opts.tol, &scale);
        price_frac[v] = std::max(0.0, minus.objective_value - (frac_total - frac_value[v]));
    }

    DecomposeOptions dopts;
    dopts.allow_doubling = false;
    const Decomposition dec =
        decompose_count_solution(inst, base.x, alpha, Rng(opts.oracle_seed), dopts);

    MechanismOutcome out;
    out.allocation = empty_allocation(n);
    const double u = rng.fork(1).next_double();
    double cum = 0.0;
    for (const auto& entry : dec.entries) {
        cum += entry.lambda;
        if (u < cum) {
            out.allocation = entry.outcome;
            break;
        }
    }

    out.payments.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
        if (!(frac_value[v] > 0.0)) continue;
        const double realized = value_count(inst.valuations[v], out.allocation.count(v));
        out.payments[v] = price_frac[v] * realized / frac_value[v];
    }
    out.realized_welfare = allocation_welfare(inst, out.allocation);
    out.fractional_optimum = base.objective_value;
    out.alpha = alpha;
    out.diagnostics["lp_gap"] = base.gap;
    out.diagnostics["alpha_achieved"] = dec.alpha_achieved;
    out.diagnostics["support"] = dec.entries.size();
    out.diagnostics["price_frac"] = price_frac;
    return out;
}

MechanismOutcome midr_mechanism(const Instance& inst, const Rng& rng, const MidrOptions& opts) {
    validate_instance(inst);
    const int n = inst.n();
    const int k = inst.k;
    MidrOptions used = opts;
    if (!(used.alpha > 0.0)) used.alpha = default_midr_alpha(inst);
    if (used.mu < 0.0) used.mu = default_midr_mu(n, k);

    const ConvexSolution sol = maximize_expected_welfare(inst, used);

    MechanismOutcome out;
    out.payments.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
        // A user with zero full-spectrum value contributes nothing to any
        // objective, so its price is identically zero; skipping the re-solve
        // keeps that exact.
        if (!(value(inst.valuations[v], k, full_spectrum(k)) > 0.0)) continue;
        std::vector<double> theta(n, 1.0);
        theta[v] = 0.0;
        const ConvexSolution minus = maximize_expected_welfare(inst, used, &theta);
        const double at_hat = perturbed_welfare(inst, sol.x, used.alpha, used.mu, &theta);
        out.payments[v] = std::max(0.0, minus.objective - at_hat);
    }

    const RoundingPlan plan = make_rounding_plan(inst, sol.x, used.alpha, used.oracle_seed);
    const Allocation tentative = round_exact(plan, rng.fork(21));
    out.allocation = perturb_midr(inst, tentative, used.mu, rng.fork(22));
    out.realized_welfare = allocation_welfare(inst, out.allocation);
    out.fractional_optimum = sol.objective;
    out.alpha = used.alpha;
    out.diagnostics["fw_gap"] = sol.fw_gap;
    out.diagnostics["newton_steps"] = sol.newton_steps;
    out.diagnostics["mu"] = used.mu;
    out.diagnostics["pre_perturbation_welfare"] = allocation_welfare(inst, tentative);
    return out;
}

TruthfulnessReport truthfulness_probe(const Instance& inst, MechanismKind kind, int trials,
                                      const Rng& rng, double tol) {
    validate_instance(inst);
    const int n = inst.n();
    const int k = inst.k;
    TruthfulnessReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> margins;

    if (kind == MechanismKind::lavi_swamy) {
        if (!all_symmetric(inst))
            throw mode_error("the scaled VCG auction needs symmetric valuations");
        const double alpha = lavi_swamy_alpha(inst);
        const CountLpSolution base = solve_count_lp(inst, tol);
        std::vector<double> frac_value(n);
        double frac_total = 0.0;
        for (int v = 0; v < n; ++v) {
            frac_value[v] = fractional_user_value(inst, base.x, v);
            frac_total += frac_value[v];
        }
        // The drop-one optimum zeroes v's objective row, so it is the same LP
        // under any report from v and can be cached across trials.
        std::vector<double> opt_minus(n, std::numeric_limits<double>::quiet_NaN());
        auto drop_one = [&](int v) {
            if (std::isnan(opt_minus[v])) {
                std::vector<double> scale(n, 1.0);
                scale[v] = 0.0;
                opt_minus[v] = solve_count_lp(inst, tol, &scale).objective_value;
            }
            return opt_minus[v];
        };

        for (int t = 0; t < trials; ++t) {
            Rng tr = rng.fork(t);
            // Round-robin keeps per-user misreport coverage exact.
            const int v = t % n;
            const double price_truth =
                std::max(0.0, drop_one(v) - (frac_total - frac_value[v]));
            const double util_truth = (frac_value[v] - price_truth) / alpha;

            Instance lie = inst;
            lie.valuations[v] = random_symmetric_valuation(k, tr.fork(1));
            const CountLpSolution moved = solve_count_lp(lie, tol);
            const double true_value_at_lie = fractional_user_value(inst, moved.x, v);
            double others = 0.0;
            for (int u = 0; u < n; ++u)
                if (u != v) others += fractional_user_value(lie, moved.x, u);
            const double price_lie = std::max(0.0, drop_one(v) - others);
            const double util_lie = (true_value_at_lie - price_lie) / alpha;

            const double margin = util_truth - util_lie;
            margins.push_back(margin);
            if (margin < rep.min_margin) {
                rep.min_margin = margin;
                rep.worst_user = v;
            }
        }
    } else {
        MidrOptions mo;
        mo.tol_gap = tol;
        mo.alpha = default_midr_alpha(inst);
        mo.mu = default_midr_mu(n, k);
        const ConvexSolution sol = maximize_expected_welfare(inst, mo);
        // Same report-independence as the LP path: theta_v = 0 removes every
        // appearance of v's valuation from the objective.
        std::vector<double> opt_minus(n, std::numeric_limits<double>::quiet_NaN());
        auto drop_one = [&](int v) {
            if (std::isnan(opt_minus[v])) {
                std::vector<double> theta(n, 1.0);
                theta[v] = 0.0;
                opt_minus[v] = maximize_expected_welfare(inst, mo, &theta).objective;
            }
            return opt_minus[v];
        };
        auto utility_at = [&](int v, const std::vector<double>& x) {
            std::vector<double> theta(n, 1.0);
            theta[v] = 0.0;
            const double price =
                std::max(0.0, drop_one(v) - perturbed_welfare(inst, x, mo.alpha, mo.mu, &theta));
            return pipeline_user_value(inst, x, mo.alpha, mo.mu, v) - price;
        };

        for (int t = 0; t < trials; ++t) {
            Rng tr = rng.fork(t);
            const int v = t % n;
            Instance lie = inst;
            lie.valuations[v] = is_symmetric(inst.valuations[v])
                                    ? Valuation(random_symmetric_valuation(k, tr.fork(1)))
                                    : Valuation(random_mrs_valuation(k, tr.fork(1)));
            const ConvexSolution moved = maximize_expected_welfare(lie, mo);

            const double margin = utility_at(v, sol.x) - utility_at(v, moved.x);
            margins.push_back(margin);
            if (margin < rep.min_margin) {
                rep.min_margin = margin;
                rep.worst_user = v;
            }
        }
    }

    if (margins.empty()) rep.min_margin = 0.0;
    rep.detail["trials"] = trials;
    rep.detail["margins"] = margins;
    return rep;
}

MonotonicityReport monotonicity_probe(const ConflictGraph& g, const Ordering& ordering,
                                      const std::vector<double>& bids, int user,
                                      const std::vector<double>& grid, bool use_local_ratio) {
    if (user < 0 || user >= g.n()) throw parameter_error("probe user out of range");
    if (static_cast<int>(bids.size()) != g.n()) throw size_error("bid vector length mismatch");
    if (grid.empty()) throw parameter_error("empty bid grid");

    std::vector<double> levels = grid;
    std::sort(levels.begin(), levels.end());
    std::vector<char> wins;
    for (double b : levels) {
        std::vector<double> current = bids;
        current[user] = b;
        const VertexSet chosen = use_local_ratio
                                     ? local_ratio_greedy(g, ordering, current).chosen
                                     : monotone_greedy(g, ordering, current);
        wins.push_back(std::find(chosen.begin(), chosen.end(), user) != chosen.end() ? 1 : 0);
    }

    MonotonicityReport rep;
    rep.user = user;
    int last_win = -1;
    for (size_t i = 0; i < levels.size(); ++i) {
        if (wins[i]) {
            last_win = static_cast<int>(i);
        } else if (last_win >= 0) {
            rep.monotone = false;
            rep.win_bid = levels[last_win];
            rep.lose_bid = levels[i];
            break;
        }
    }
    rep.detail["levels"] = levels;
    rep.detail["wins"] = std::vector<int>(wins.begin(), wins.end());
    return rep;
}

}  // namespace specauction
