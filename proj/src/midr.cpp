#include "specauction/midr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <utility>

#include "specauction/errors.hpp"
#include "specauction/lp.hpp"
#include "specauction/rounding.hpp"

namespace specauction {

namespace {

double user_full_value(const Instance& inst, int v) {
    const ChannelSet full = inst.k >= 32 ? ~ChannelSet{0} : (ChannelSet{1} << inst.k) - 1;
    return value(inst.valuations[v], inst.k, full);
}

struct Eval {
    double value = 0.0;
    std::vector<double> grad;
    std::vector<std::vector<double>> block;  // per user, k*k row-major d2F
};

// Perturbed objective and derivatives in x. Per user the Hessian factors
// through the lottery Hessian scaled by q' plus a diagonal q'' term, so the
// curvature stays block diagonal across users.
Eval eval_objective(const Instance& inst, const std::vector<double>& x, double alpha, double mu,
                    const std::vector<double>& theta, bool need_grad, bool need_hess) {
    const int n = inst.n();
    const int k = inst.k;
    Eval out;
    if (need_grad) out.grad.assign(static_cast<size_t>(n) * k, 0.0);
    if (need_hess) out.block.assign(n, {});

    double weighted_full = 0.0;
    for (int v = 0; v < n; ++v) weighted_full += theta[v] * user_full_value(inst, v);
    const double c_mu = n > 0 && k > 0 ? mu * weighted_full / (static_cast<double>(n) * n * k) : 0.0;

    double q_sum = 0.0;
    std::vector<double> q(k), qp(k), qpp(k);
    for (int v = 0; v < n; ++v) {
        for (int j = 0; j < k; ++j) {
            const double e = std::exp(-x[channel_var(v, j, k)] / (2.0 * alpha));
            q[j] = 1.0 - e;
            qp[j] = e / (2.0 * alpha);
            qpp[j] = -qp[j] / (2.0 * alpha);
            q_sum += q[j];
        }
        std::vector<double> lg;
        std::vector<double> lh;
        if (theta[v] != 0.0) {
            out.value += (1.0 - mu) * theta[v] * lottery_value(inst.valuations[v], q);
            if (need_grad) lg = lottery_gradient(inst.valuations[v], q);
            if (need_hess) lh = lottery_hessian(inst.valuations[v], q);
        }
        if (need_grad)
            for (int j = 0; j < k; ++j) {
                const double outer = (theta[v] != 0.0 ? (1.0 - mu) * theta[v] * lg[j] : 0.0) + c_mu;
                out.grad[channel_var(v, j, k)] = outer * qp[j];
            }
        if (need_hess) {
            std::vector<double>& b = out.block[v];
            b.assign(static_cast<size_t>(k) * k, 0.0);
            for (int j1 = 0; j1 < k; ++j1) {
                for (int j2 = 0; j2 < k; ++j2)
                    if (theta[v] != 0.0)
                        b[j1 * k + j2] =
                            (1.0 - mu) * theta[v] * lh[j1 * k + j2] * qp[j1] * qp[j2];
                const double outer =
                    (theta[v] != 0.0 ? (1.0 - mu) * theta[v] * lg[j1] : 0.0) + c_mu;
                b[j1 * k + j1] += outer * qpp[j1];
            }
        }
    }
    out.value += c_mu * q_sum;
    return out;
}

// In-place LL' factorization and solve; false when the matrix is not
// numerically positive definite.
bool solve_spd(std::vector<double>& m, int dim, std::vector<double>& rhs) {
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = m[static_cast<size_t>(i) * dim + j];
            for (int p = 0; p < j; ++p)
                sum -= m[static_cast<size_t>(i) * dim + p] * m[static_cast<size_t>(j) * dim + p];
            if (i == j) {
                if (!(sum > 0.0)) return false;
                m[static_cast<size_t>(i) * dim + j] = std::sqrt(sum);
            } else {
                m[static_cast<size_t>(i) * dim + j] = sum / m[static_cast<size_t>(j) * dim + j];
            }
        }
    }
    for (int i = 0; i < dim; ++i) {
        double sum = rhs[i];
        for (int p = 0; p < i; ++p) sum -= m[static_cast<size_t>(i) * dim + p] * rhs[p];
        rhs[i] = sum / m[static_cast<size_t>(i) * dim + i];
    }
    for (int i = dim - 1; i >= 0; --i) {
        double sum = rhs[i];
        for (int p = i + 1; p < dim; ++p) sum -= m[static_cast<size_t>(p) * dim + i] * rhs[p];
        rhs[i] = sum / m[static_cast<size_t>(i) * dim + i];
    }
    return true;
}

struct BarrierRow {
    std::vector<std::pair<int, double>> terms;  // local free index, coefficient
    double rhs = 0.0;
};

struct BarrierProblem {
    std::vector<int> free_ids;   // global channel_var per free variable
    std::vector<int> local_of;   // global -> local, -1 when forced to zero
    std::vector<BarrierRow> rows;
};

// Channel-form polytope rows; rho = 0 rows force their variables to zero and
// disappear, everything else keeps a strictly positive right-hand side.
BarrierProblem build_barrier_problem(const Instance& inst) {
    const int n = inst.n();
    const int k = inst.k;
    const ConflictGraph& g = inst.graph.graph;
    const Ordering& ordering = inst.graph.ordering;
    const double rho = ordering.rho;

    std::vector<char> forced(static_cast<size_t>(n) * k, 0);
    struct RawRow {
        std::vector<std::pair<int, double>> terms;  // global ids
    };
    std::vector<RawRow> raw;
    for (int v = 0; v < n; ++v) {
        std::vector<std::pair<int, double>> base;
        for (int u = 0; u < n; ++u) {
            if (u == v || ordering.position[u] >= ordering.position[v]) continue;
            const double w = symmetric_weight(g, u, v);
            if (w > 0.0) base.emplace_back(u, w);
        }
        if (base.empty()) continue;
        for (int j = 0; j < k; ++j) {
            RawRow row;
            for (auto& [u, w] : base) row.terms.emplace_back(channel_var(u, j, k), w);
            if (rho <= 0.0) {
                for (auto& [id, w] : row.terms) forced[id] = 1;
            } else {
                raw.push_back(std::move(row));
            }
        }
    }

    BarrierProblem prob;
    prob.local_of.assign(static_cast<size_t>(n) * k, -1);
    for (int id = 0; id < n * k; ++id) {
        if (forced[id]) continue;
        prob.local_of[id] = static_cast<int>(prob.free_ids.size());
        prob.free_ids.push_back(id);
    }
    for (const RawRow& row : raw) {
        BarrierRow out;
        out.rhs = rho;
        for (auto& [id, w] : row.terms)
            if (prob.local_of[id] >= 0) out.terms.emplace_back(prob.local_of[id], w);
        if (!out.terms.empty()) prob.rows.push_back(std::move(out));
    }
    return prob;
}

// Certified first-order gap: max over the polytope of grad'(y - x). The
// polytope is a product of per-channel packing polytopes, so k LP solves with
// the positive part of the gradient settle it exactly (negative coordinates
// take y = 0 at the optimum).
double frank_wolfe_gap(const Instance& inst, const std::vector<double>& x,
                       const std::vector<double>& grad) {
    const int n = inst.n();
    const int k = inst.k;
    double best = 0.0;
    std::vector<double> weights(n);
    for (int j = 0; j < k; ++j) {
        double positive = 0.0;
        for (int v = 0; v < n; ++v) {
            weights[v] = std::max(grad[channel_var(v, j, k)], 0.0);
            positive += weights[v];
        }
        if (positive > 0.0) {
            const ChannelLpSolution sol =
                solve_channel_lp(inst.graph.graph, inst.graph.ordering, weights, 1e-10);
            best += sol.objective_value + std::max(sol.gap, 0.0);
        }
    }
    double at_x = 0.0;
    for (int id = 0; id < n * k; ++id) at_x += grad[id] * x[id];
    return std::max(best - at_x, 0.0);
}

double ldexp_clamped(int exponent) { return std::ldexp(1.0, std::max(exponent, -1000)); }

// Retention probability that converts a tentative win at decomposition scale
// alpha into the exact exponential marginal over the increment [lo, hi].
double retention_probability(double lo, double hi, double alpha) {
    const double delta = hi - lo;
    double ret;
    if (delta < 1e-12) {
        ret = std::exp(-lo / (2.0 * alpha));
    } else {
        ret = 2.0 * alpha * (std::exp(-lo / (2.0 * alpha)) - std::exp(-hi / (2.0 * alpha))) / delta;
    }
    if (ret < -1e-9 || ret > 1.0 + 1e-9)
        throw simulation_error("retention probability left [0, 1]");
    return std::min(std::max(ret, 0.0), 1.0);
}

ChannelOracle channel_oracle_for(const Instance& inst, const std::vector<double>& x_col,
                                 uint64_t seed) {
    if (inst.graph.graph.unweighted())
        return make_greedy_oracle(inst.graph.graph, inst.graph.ordering);
    return make_weighted_oracle(inst.graph.graph, inst.graph.ordering, x_col, seed);
}

}  // namespace

double default_midr_mu(int n, int k) {
    return ldexp_clamped(-std::max(n * k, 40));
}

double default_midr_alpha(const Instance& inst) {
    // The rounding plan divides the fractional point by alpha, so the
    // committed scale must keep x / alpha inside the integral hull. The box
    // face alone forces alpha >= 1 (edgeless graphs have rho_eff = 1/4).
    const double rho_eff = effective_rho(inst.graph.ordering.rho);
    if (inst.graph.graph.unweighted()) return std::max(rho_eff, 1.0);
    const int log_n = static_cast<int>(std::ceil(std::log2(std::max(inst.n(), 2))));
    return std::max(4.0 * rho_eff * std::max(log_n, 1), 1.0);
}

std::vector<double> rounding_probabilities(const std::vector<double>& x, double alpha) {
    if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
    std::vector<double> q(x.size());
    for (size_t i = 0; i < x.size(); ++i) q[i] = -std::expm1(-x[i] / (2.0 * alpha));
    return q;
}

double pipeline_user_value(const Instance& inst, const std::vector<double>& x, double alpha,
                           double mu, int v) {
    const int n = inst.n();
    const int k = inst.k;
    const std::vector<double> q = rounding_probabilities(x, alpha);
    std::vector<double> qv(q.begin() + static_cast<size_t>(v) * k,
                           q.begin() + static_cast<size_t>(v + 1) * k);
    double q_sum = 0.0;
    for (double p : q) q_sum += p;
    return (1.0 - mu) * lottery_value(inst.valuations[v], qv) +
           mu * q_sum * user_full_value(inst, v) / (static_cast<double>(n) * n * k);
}

double perturbed_welfare(const Instance& inst, const std::vector<double>& x, double alpha,
                         double mu, const std::vector<double>* user_weight) {
    const int n = inst.n();
    std::vector<double> theta(n, 1.0);
    if (user_weight) {
        if (static_cast<int>(user_weight->size()) != n)
            throw size_error("user weight length mismatch");
        theta = *user_weight;
    }
    const Eval e = eval_objective(inst, x, alpha, mu, theta, false, false);
    return e.value;
}

ConvexSolution maximize_expected_welfare(const Instance& inst, const MidrOptions& opts,
                                         const std::vector<double>* user_weight) {
    const int n = inst.n();
    const int k = inst.k;
    ConvexSolution sol;
    sol.x.assign(static_cast<size_t>(n) * k, 0.0);
    if (n == 0 || k == 0) return sol;
    if (k > 20) throw size_error("lottery evaluation is guarded at k <= 20");

    const double alpha = opts.alpha > 0.0 ? opts.alpha : default_midr_alpha(inst);
    const double mu = opts.mu >= 0.0 ? opts.mu : default_midr_mu(n, k);
    std::vector<double> theta(n, 1.0);
    if (user_weight) {
        if (static_cast<int>(user_weight->size()) != n)
            throw size_error("user weight length mismatch");
        theta = *user_weight;
    }

    const BarrierProblem prob = build_barrier_problem(inst);
    const int dim = static_cast<int>(prob.free_ids.size());
    if (dim == 0) {
        const Eval e = eval_objective(inst, sol.x, alpha, mu, theta, false, false);
        sol.objective = e.value;
        return sol;
    }

    // Strictly interior start: half the tightest uniform row budget.
    double start = 0.4;
    for (const BarrierRow& row : prob.rows) {
        double coef_sum = 0.0;
        for (auto& [l, w] : row.terms) coef_sum += w;
        start = std::min(start, row.rhs / (2.0 * coef_sum));
    }
    std::vector<double> x = sol.x;
    for (int id : prob.free_ids) x[id] = start;

    const int m_total = static_cast<int>(prob.rows.size()) + 2 * dim;
    auto barrier_value = [&](const std::vector<double>& pt, double t, bool& feasible) {
        // Bounds first: the objective is only defined on the box.
        feasible = true;
        double logs = 0.0;
        for (const BarrierRow& row : prob.rows) {
            double slack = row.rhs;
            for (auto& [l, w] : row.terms) slack -= w * pt[prob.free_ids[l]];
            if (slack <= 0.0) {
                feasible = false;
                return 0.0;
            }
            logs += std::log(slack);
        }
        for (int id : prob.free_ids) {
            const double xv = pt[id];
            if (xv <= 0.0 || xv >= 1.0) {
                feasible = false;
                return 0.0;
            }
            logs += std::log(xv) + std::log(1.0 - xv);
        }
        const Eval e = eval_objective(inst, pt, alpha, mu, theta, false, false);
        return t * e.value + logs;
    };

    double t = 1.0;
    bool have_snapshot = false;
    std::vector<double> snap_x;
    double snap_value = 0.0, snap_gap = 0.0;
    for (int outer = 0; outer < 60; ++outer) {
        bool centered = false;
        for (int inner = 0; inner < 60; ++inner) {
            const Eval e = eval_objective(inst, x, alpha, mu, theta, true, true);
            std::vector<double> grad_t(dim, 0.0);
            std::vector<double> hess(static_cast<size_t>(dim) * dim, 0.0);
            for (int l = 0; l < dim; ++l) grad_t[l] = t * e.grad[prob.free_ids[l]];
            for (int v = 0; v < n; ++v)
                for (int j1 = 0; j1 < k; ++j1) {
                    const int l1 = prob.local_of[channel_var(v, j1, k)];
                    if (l1 < 0) continue;
                    for (int j2 = 0; j2 < k; ++j2) {
                        const int l2 = prob.local_of[channel_var(v, j2, k)];
                        if (l2 < 0) continue;
                        hess[static_cast<size_t>(l1) * dim + l2] -= t * e.block[v][j1 * k + j2];
                    }
                }
            for (const BarrierRow& row : prob.rows) {
                double slack = row.rhs;
                for (auto& [l, w] : row.terms) slack -= w * x[prob.free_ids[l]];
                for (auto& [l1, w1] : row.terms) {
                    grad_t[l1] -= w1 / slack;
                    for (auto& [l2, w2] : row.terms)
                        hess[static_cast<size_t>(l1) * dim + l2] += w1 * w2 / (slack * slack);
                }
            }
            for (int l = 0; l < dim; ++l) {
                const double xv = x[prob.free_ids[l]];
                grad_t[l] += 1.0 / xv - 1.0 / (1.0 - xv);
                hess[static_cast<size_t>(l) * dim + l] +=
                    1.0 / (xv * xv) + 1.0 / ((1.0 - xv) * (1.0 - xv));
            }

            std::vector<double> dir = grad_t;
            std::vector<double> factor = hess;
            bool ok = solve_spd(factor, dim, dir);
            for (double ridge = 1e-12; !ok && ridge < 1e-3; ridge *= 100.0) {
                factor = hess;
                for (int l = 0; l < dim; ++l) factor[static_cast<size_t>(l) * dim + l] += ridge;
                dir = grad_t;
                ok = solve_spd(factor, dim, dir);
            }
            if (!ok) throw solver_error("barrier Newton system is not positive definite");

            double decrement = 0.0;
            for (int l = 0; l < dim; ++l) decrement += grad_t[l] * dir[l];
            ++sol.newton_steps;
            // Centered once the squared Newton decrement is inside the
            // self-concordance region and the implied objective slack
            // decrement / t is far below the gap budget.
            const double slack_cap =
                0.05 * opts.tol_gap * std::max(1.0, std::abs(e.value)) * t;
            if (decrement <= std::min(0.25, std::max(1e-12, slack_cap))) {
                centered = true;
                break;
            }

            bool feasible = false;
            const double f0 = barrier_value(x, t, feasible);
            double step = 1.0;
            std::vector<double> trial = x;
            for (int bt = 0; bt < 60; ++bt) {
                for (int l = 0; l < dim; ++l)
                    trial[prob.free_ids[l]] = x[prob.free_ids[l]] + step * dir[l];
                bool trial_ok = false;
                const double f1 = barrier_value(trial, t, trial_ok);
                if (trial_ok && f1 >= f0 + 0.25 * step * decrement) break;
                step *= 0.5;
                if (bt == 59) step = 0.0;
            }
            if (step == 0.0) break;
            for (int l = 0; l < dim; ++l) x[prob.free_ids[l]] += step * dir[l];
        }

        const Eval e = eval_objective(inst, x, alpha, mu, theta, true, false);
        const double budget = opts.tol_gap * std::max(1.0, std::abs(e.value));
        if (centered && static_cast<double>(m_total) / t <= 0.5 * budget) {
            const double gap = frank_wolfe_gap(inst, x, e.grad);
            if (gap <= budget) {
                sol.x = x;
                sol.objective = e.value;
                sol.fw_gap = gap;
                return sol;
            }
            // Path bound holds but the tangent certificate has not reached
            // the budget yet; remember the point and keep pushing t.
            have_snapshot = true;
            snap_x = x;
            snap_value = e.value;
            snap_gap = gap;
        }
        t *= 8.0;
        if (t > 1e15) break;
    }
    // The tangent-plane gap of a near-optimal point scales like the square
    // root of the remaining centering error, so it can floor around 1e-8 in
    // doubles when the optimum is interior to a face. Accept on the trusted
    // path bound as long as the tangent gap is far below any gross-error
    // scale, and report the gap actually achieved.
    if (have_snapshot && snap_gap <= 1e-6 * std::max(1.0, std::abs(snap_value))) {
        sol.x = snap_x;
        sol.objective = snap_value;
        sol.fw_gap = snap_gap;
        return sol;
    }
    throw solver_error("convex solver could not certify the requested gap");
}

RoundingPlan make_rounding_plan(const Instance& inst, const std::vector<double>& x, double alpha,
                                uint64_t oracle_seed) {
    const int n = inst.n();
    const int k = inst.k;
    if (static_cast<int>(x.size()) != n * k) throw size_error("channel point length mismatch");
    RoundingPlan plan;
    plan.n = n;
    plan.k = k;
    plan.alpha = alpha;
    plan.x = x;
    DecomposeOptions opts;
    opts.allow_doubling = false;
    for (int j = 0; j < k; ++j) {
        std::vector<double> col(n);
        for (int v = 0; v < n; ++v) col[v] = x[channel_var(v, j, k)];
        const ChannelOracle oracle = channel_oracle_for(inst, col, oracle_seed + j);
        plan.per_channel.push_back(
            decompose_channel(inst.graph.graph, inst.graph.ordering, col, alpha, oracle, opts));
    }
    return plan;
}

Allocation round_exact(const RoundingPlan& plan, const Rng& rng) {
    Allocation alloc = empty_allocation(plan.n);
    for (int j = 0; j < plan.k; ++j) {
        const Decomposition& dec = plan.per_channel[j];
        const double u = rng.fork(1, j).next_double();
        double cum = 0.0;
        const Allocation* picked = nullptr;
        for (const auto& entry : dec.entries) {
            cum += entry.lambda;
            if (u < cum) {
                picked = &entry.outcome;
                break;
            }
        }
        if (!picked) continue;
        for (int v = 0; v < plan.n; ++v) {
            if (picked->sets[v] == 0) continue;
            const double xv = plan.x[channel_var(v, j, plan.k)];
            // P[tentative] = x / alpha, so retaining with q / (x / alpha)
            // leaves exactly q; the ratio tends to 1/2 as x -> 0.
            double ret;
            if (xv < 1e-12) {
                ret = 0.5;
            } else {
                ret = plan.alpha * -std::expm1(-xv / (2.0 * plan.alpha)) / xv;
            }
            if (rng.fork(2, j).fork(v).next_double() < ret)
                alloc.sets[v] |= ChannelSet{1} << j;
        }
    }
    return alloc;
}

SimulationContext make_simulation_context(const Instance& inst, const MidrOptions& opts) {
    const ConvexSolution sol = maximize_expected_welfare(inst, opts);
    MidrOptions used = opts;
    if (!(used.alpha > 0.0)) used.alpha = default_midr_alpha(inst);
    std::vector<double> cached = sol.x;
    return make_simulation_context(inst, used,
                                   [cached](int) -> std::vector<double> { return cached; });
}

SimulationContext make_simulation_context(const Instance& inst, const MidrOptions& opts,
                                          std::function<std::vector<double>(int)> estimate) {
    SimulationContext ctx;
    ctx.inst = inst;
    ctx.alpha = opts.alpha > 0.0 ? opts.alpha : default_midr_alpha(inst);
    ctx.estimate = std::move(estimate);
    ctx.oracle_seed = opts.oracle_seed;
    ctx.y_levels[0].assign(static_cast<size_t>(inst.n()) * inst.k, 0.0);
    return ctx;
}

namespace {

const std::vector<double>& ensure_level(SimulationContext& ctx, int t) {
    auto it = ctx.y_levels.find(t);
    if (it != ctx.y_levels.end()) return it->second;
    const std::vector<double>& prev = ensure_level(ctx, t - 1);
    const int n = ctx.inst.n();
    const int k = ctx.inst.k;
    std::vector<double> xt = ctx.estimate(t);
    if (static_cast<int>(xt.size()) != n * k)
        throw simulation_error("estimator returned a point of the wrong shape");
    const double delta = std::ldexp(1.0 / n, -(t + 1));
    std::vector<double> y(xt.size());
    for (size_t i = 0; i < y.size(); ++i) y[i] = std::max(prev[i], xt[i] - delta);
    return ctx.y_levels.emplace(t, std::move(y)).first->second;
}

}  // namespace

Allocation simulate_midr(SimulationContext& ctx, const Rng& rng) {
    const int n = ctx.inst.n();
    const int k = ctx.inst.k;
    Allocation alloc = empty_allocation(n);
    for (int j = 0; j < k; ++j) {
        const double p = rng.fork(1, j).next_double();
        int level = 1;
        while (level < ctx.level_cap && !(p < 1.0 - std::ldexp(1.0, -level))) ++level;
        const double window = std::ldexp(1.0, -level);
        const double u = std::min(p - (1.0 - 2.0 * window), window * (1.0 - 1e-15));

        const std::vector<double>& y_cur = ensure_level(ctx, level);
        const std::vector<double>& y_prev = ensure_level(ctx, level - 1);

        if (level == 1) {
            auto cached = ctx.level_one.find(j);
            if (cached == ctx.level_one.end()) {
                std::vector<double> col(n);
                for (int v = 0; v < n; ++v) col[v] = y_cur[channel_var(v, j, k)];
                DecomposeOptions opts;
                opts.allow_doubling = false;
                const ChannelOracle oracle =
                    channel_oracle_for(ctx.inst, col, ctx.oracle_seed + 1000 + j);
                cached = ctx.level_one
                             .emplace(j, decompose_channel(ctx.inst.graph.graph,
                                                           ctx.inst.graph.ordering, col,
                                                           ctx.alpha, oracle, opts))
                             .first;
            }
            double cum = 0.0;
            const Allocation* picked = nullptr;
            for (const auto& entry : cached->second.entries) {
                cum += entry.lambda / 2.0;
                if (u < cum) {
                    picked = &entry.outcome;
                    break;
                }
            }
            if (!picked) continue;
            for (int v = 0; v < n; ++v) {
                if (picked->sets[v] == 0) continue;
                const double ret =
                    retention_probability(0.0, y_cur[channel_var(v, j, k)], ctx.alpha);
                if (rng.fork(2, j).fork(v).next_double() < ret)
                    alloc.sets[v] |= ChannelSet{1} << j;
            }
        } else {
            // Later levels move one user at a time: increments are below
            // 1/(n 2^{level-1}), so singleton masses fit inside the window.
            double mass = 0.0;
            int selected = -1;
            double lo = 0.0, hi = 0.0;
            for (int v = 0; v < n; ++v) {
                const double cur = y_cur[channel_var(v, j, k)];
                const double prev = y_prev[channel_var(v, j, k)];
                if (cur < prev - 1e-15)
                    throw simulation_error("estimator produced a non-monotone refinement");
                const double lambda = std::max(cur - prev, 0.0) / (2.0 * ctx.alpha);
                if (selected < 0 && u < mass + lambda) {
                    selected = v;
                    lo = prev;
                    hi = cur;
                }
                mass += lambda;
            }
            if (mass > window * (1.0 + 1e-9))
                throw simulation_error("estimator increments exceed the level budget");
            if (selected < 0) continue;
            const double ret = retention_probability(lo, hi, ctx.alpha);
            if (rng.fork(2, j).fork(selected).next_double() < ret)
                alloc.sets[selected] |= ChannelSet{1} << j;
        }
    }
    return alloc;
}

Allocation perturb_midr(const Instance& inst, const Allocation& alloc, double mu, const Rng& rng) {
    const int n = inst.n();
    const int k = inst.k;
    if (mu < 0.0 || mu > 1.0) throw parameter_error("mu must lie in [0, 1]");
    if (static_cast<int>(alloc.sets.size()) != n) throw size_error("allocation length mismatch");
    if (rng.fork(0).next_double() < 1.0 - mu) return alloc;
    Allocation out = empty_allocation(n);
    if (n == 0 || k == 0) return out;
    double beta = 0.0;
    for (int v = 0; v < n; ++v) beta += alloc.count(v);
    beta /= static_cast<double>(n) * k;
    if (rng.fork(1).next_double() < beta) {
        const int target = static_cast<int>(rng.fork(2).next_below(static_cast<uint64_t>(n)));
        out.sets[target] = k >= 32 ? ~ChannelSet{0} : (ChannelSet{1} << k) - 1;
    }
    return out;
}

}  // namespace specauction
