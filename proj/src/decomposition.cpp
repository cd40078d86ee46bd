#include "specauction/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <utility>

#include "specauction/errors.hpp"
#include "specauction/greedy.hpp"
#include "specauction/lp.hpp"
#include "specauction/rounding.hpp"

namespace specauction {

namespace {

constexpr double kSepTol = 1e-9;
constexpr double kMassFloor = 1e-15;

double clamp01(double x) { return std::min(std::max(x, 0.0), 1.0); }

// Column of the decomposition master: the support rows it covers plus the
// concrete outcome realizing them. Rows are sorted and hold at most one row
// per user, so deleting a row maps to clearing that user's channel set.
struct GenColumn {
    std::vector<int> rows;
    Allocation outcome;
};

bool has_row(const std::vector<int>& rows, int r) {
    return std::binary_search(rows.begin(), rows.end(), r);
}

// One vector in the null space of A (rows x cols, cols > rank), empty when A
// is numerically full column rank. Gauss-Jordan with partial pivoting; the
// first free column is selected, which keeps pruning deterministic.
std::vector<double> nullspace_vector(std::vector<std::vector<double>> a) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    std::vector<int> pivot_col;
    std::vector<char> is_pivot(cols, 0);
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int best = -1;
        double best_abs = 1e-9;
        for (int r = rank; r < rows; ++r)
            if (std::abs(a[r][c]) > best_abs) {
                best_abs = std::abs(a[r][c]);
                best = r;
            }
        if (best < 0) continue;
        std::swap(a[rank], a[best]);
        const double piv = a[rank][c];
        for (double& x : a[rank]) x /= piv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a[r][c] == 0.0) continue;
            const double f = a[r][c];
            for (int cc = 0; cc < cols; ++cc) a[r][cc] -= f * a[rank][cc];
        }
        pivot_col.push_back(c);
        is_pivot[c] = 1;
        ++rank;
    }
    int free_col = -1;
    for (int c = 0; c < cols; ++c)
        if (!is_pivot[c]) {
            free_col = c;
            break;
        }
    if (free_col < 0) return {};
    std::vector<double> mu(cols, 0.0);
    mu[free_col] = 1.0;
    for (int r = 0; r < rank; ++r) mu[pivot_col[r]] = -a[r][free_col];
    return mu;
}

// Shrinks the support to at most m + 1 entries by walking null directions of
// the marginal system; row marginals and the total mass are invariant.
void caratheodory_prune(std::vector<std::pair<double, GenColumn>>& entries, int m) {
    while (static_cast<int>(entries.size()) > m + 1) {
        const int count = static_cast<int>(entries.size());
        std::vector<std::vector<double>> a(m + 1, std::vector<double>(count, 0.0));
        for (int l = 0; l < count; ++l) {
            for (int r : entries[l].second.rows) a[r][l] = 1.0;
            a[m][l] = 1.0;
        }
        std::vector<double> mu = nullspace_vector(std::move(a));
        if (mu.empty()) break;
        bool has_pos = false;
        for (double x : mu) has_pos = has_pos || x > 1e-12;
        if (!has_pos)
            for (double& x : mu) x = -x;
        double step = 0.0;
        int drop = -1;
        for (int l = 0; l < count; ++l) {
            if (mu[l] <= 1e-12) continue;
            const double t = entries[l].first / mu[l];
            if (drop < 0 || t < step) {
                step = t;
                drop = l;
            }
        }
        if (drop < 0) break;
        for (int l = 0; l < count; ++l) entries[l].first -= step * mu[l];
        entries[drop].first = 0.0;
        std::vector<std::pair<double, GenColumn>> kept;
        kept.reserve(entries.size());
        for (auto& e : entries)
            if (e.first > kMassFloor) kept.push_back(std::move(e));
        if (static_cast<int>(kept.size()) >= count) break;
        entries = std::move(kept);
    }
}

struct EngineOutcome {
    double theta = 0.0;
    std::vector<std::pair<double, GenColumn>> cover;
    std::vector<double> duals;
};

// Restricted-master column generation. The master maximizes xt'a over
// 0 <= a <= 1 subject to a(column) <= 1 per pool column; its dual prices are
// a fractional cover of xt by pool columns plus singleton top-ups. The oracle
// must return a column worth more than 1 under a whenever one exists at this
// alpha; when it cannot, theta = cover mass certifies the verdict.
EngineOutcome generate_columns(int m, const std::vector<double>& xt,
                               std::vector<GenColumn>& pool,
                               const std::function<GenColumn(const std::vector<double>&)>& oracle,
                               const std::function<Allocation(int)>& singleton,
                               double master_tol) {
    std::set<std::vector<int>> seen;
    for (const auto& col : pool) seen.insert(col.rows);
    const int iter_cap = 1000 + 30 * m;
    for (int iter = 0; iter < iter_cap; ++iter) {
        PackingLp master;
        master.num_vars = m;
        master.objective = xt;
        master.upper.assign(m, 1.0);
        for (const auto& col : pool) {
            if (col.rows.empty()) continue;
            PackingLp::Row row;
            row.rhs = 1.0;
            for (int r : col.rows) row.terms.emplace_back(r, 1.0);
            master.rows.push_back(std::move(row));
        }
        const LpSolution sol = solve_packing_lp(master, master_tol);

        GenColumn cand = oracle(sol.x);
        double val = 0.0;
        for (int r : cand.rows) val += sol.x[r];
        if (val > 1.0 + kSepTol && !cand.rows.empty() && !seen.count(cand.rows)) {
            seen.insert(cand.rows);
            pool.push_back(std::move(cand));
            continue;
        }

        EngineOutcome out;
        int lp_row = 0;
        for (const auto& col : pool) {
            if (col.rows.empty()) continue;
            const double y = sol.dual_rows[lp_row++];
            out.theta += y;
            if (y > kMassFloor) out.cover.emplace_back(y, col);
        }
        for (int r = 0; r < m; ++r) {
            const double z = sol.dual_upper[r];
            out.theta += z;
            if (z > kMassFloor) out.cover.emplace_back(z, GenColumn{{r}, singleton(r)});
        }
        out.duals = sol.x;
        return out;
    }
    throw decomposition_error("column generation exceeded its iteration budget");
}

// Cover -> exact decomposition: reduce each row to its target by splitting
// covering columns (the split-off copy drops the row's user), merge duplicate
// columns, pad with the empty outcome, prune, and force the mass to 1.
std::vector<DecompositionEntry> assemble_entries(int n, int m, const std::vector<double>& xt,
                                                 std::vector<std::pair<double, GenColumn>> raw,
                                                 const std::function<int(int)>& owner) {
    for (int r = 0; r < m; ++r) {
        double cur = 0.0;
        for (const auto& e : raw)
            if (has_row(e.second.rows, r)) cur += e.first;
        double excess = cur - xt[r];
        const size_t snapshot = raw.size();
        for (size_t l = 0; l < snapshot && excess > kMassFloor; ++l) {
            auto& entry = raw[l];
            if (entry.first <= 0.0 || !has_row(entry.second.rows, r)) continue;
            const double delta = std::min(entry.first, excess);
            entry.first -= delta;
            excess -= delta;
            GenColumn reduced = entry.second;
            reduced.rows.erase(std::remove(reduced.rows.begin(), reduced.rows.end(), r),
                               reduced.rows.end());
            reduced.outcome.sets[owner(r)] = 0;
            raw.emplace_back(delta, std::move(reduced));
        }
    }

    std::map<std::vector<int>, size_t> index;
    std::vector<std::pair<double, GenColumn>> merged;
    for (auto& e : raw) {
        if (e.first <= kMassFloor) continue;
        auto it = index.find(e.second.rows);
        if (it == index.end()) {
            index.emplace(e.second.rows, merged.size());
            merged.push_back(std::move(e));
        } else {
            merged[it->second].first += e.first;
        }
    }

    double total = 0.0;
    for (const auto& e : merged) total += e.first;
    if (total > 1.0)
        for (auto& e : merged) e.first /= total;

    auto empty_it = index.find(std::vector<int>{});
    if (empty_it == index.end()) merged.emplace_back(0.0, GenColumn{{}, empty_allocation(n)});

    caratheodory_prune(merged, m);

    // Route the rounding slack through the empty outcome so the mass is 1.
    total = 0.0;
    int empty_idx = -1;
    for (size_t l = 0; l < merged.size(); ++l) {
        total += merged[l].first;
        if (merged[l].second.rows.empty()) empty_idx = static_cast<int>(l);
    }
    if (empty_idx < 0) {
        merged.emplace_back(0.0, GenColumn{{}, empty_allocation(n)});
        empty_idx = static_cast<int>(merged.size()) - 1;
    }
    merged[empty_idx].first += 1.0 - total;
    if (merged[empty_idx].first < 0.0) {
        merged[empty_idx].first = 0.0;
        total = 0.0;
        for (const auto& e : merged) total += e.first;
        for (auto& e : merged) e.first /= total;
    }

    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.second.rows < b.second.rows; });
    std::vector<DecompositionEntry> entries;
    entries.reserve(merged.size());
    for (auto& e : merged) entries.push_back({e.first, std::move(e.second.outcome)});
    return entries;
}

// Exact max-weight independent set in the weighted sense (every member's
// incoming weight from the others stays below 1). Plain DFS with an
// optimistic suffix bound; intended for small n only.
VertexSet max_weight_independent_set(const ConflictGraph& g, const std::vector<double>& a) {
    const int n = g.n();
    std::vector<int> cand(n);
    for (int v = 0; v < n; ++v) cand[v] = v;
    std::sort(cand.begin(), cand.end(), [&](int u, int v) {
        if (a[u] != a[v]) return a[u] > a[v];
        return u < v;
    });
    std::vector<double> suffix(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + std::max(a[cand[i]], 0.0);

    VertexSet best;
    double best_val = 0.0;
    std::vector<int> chosen;
    auto feasible_with = [&](int v) {
        double into_v = 0.0;
        for (int u : chosen) into_v += g.weight(u, v);
        if (into_v >= 1.0) return false;
        for (int u : chosen) {
            double into_u = g.weight(v, u);
            for (int w : chosen)
                if (w != u) into_u += g.weight(w, u);
            if (into_u >= 1.0) return false;
        }
        return true;
    };
    std::function<void(int, double)> dfs = [&](int idx, double val) {
        if (val > best_val) {
            best_val = val;
            best = chosen;
        }
        if (idx == n || val + suffix[idx] <= best_val) return;
        const int v = cand[idx];
        if (a[v] > 0.0 && feasible_with(v)) {
            chosen.push_back(v);
            dfs(idx + 1, val + a[v]);
            chosen.pop_back();
        }
        dfs(idx + 1, val);
    };
    dfs(0, 0.0);
    std::sort(best.begin(), best.end());
    return best;
}

std::string dual_witness_message(double alpha, double theta, const std::vector<double>& duals) {
    char buf[256];
    double top = 0.0;
    for (double d : duals) top = std::max(top, d);
    std::snprintf(buf, sizeof buf,
                  "no decomposition at alpha=%.6g: residual dual mass theta=%.9g (max dual %.6g)",
                  alpha, theta, top);
    return buf;
}

DecompositionReport verify_common(const std::vector<DecompositionEntry>& entries) {
    DecompositionReport report;
    double total = 0.0;
    for (const auto& e : entries) {
        if (e.lambda < -1e-12) {
            report.ok = false;
            report.detail = "negative weight";
        }
        total += e.lambda;
    }
    report.lambda_sum_error = std::abs(total - 1.0);
    if (report.lambda_sum_error > 1e-9) {
        report.ok = false;
        if (report.detail.empty()) report.detail = "weights do not sum to 1";
    }
    return report;
}

}  // namespace

ChannelOracle make_greedy_oracle(const ConflictGraph& g, const Ordering& ordering) {
    return [g, ordering](const std::vector<double>& a) {
        return local_ratio_greedy(g, ordering, a).chosen;
    };
}

ChannelOracle make_weighted_oracle(const ConflictGraph& g, const Ordering& ordering,
                                   const std::vector<double>& x_col, uint64_t seed,
                                   int exact_limit) {
    if (static_cast<int>(x_col.size()) != g.n()) throw size_error("fractional point length mismatch");
    struct State {
        ConflictGraph g;
        Ordering ordering;
        std::vector<double> x;
        Rng base;
        int exact_limit;
        uint64_t calls = 0;
    };
    auto st = std::make_shared<State>(State{g, ordering, x_col, Rng(seed), exact_limit});
    return [st](const std::vector<double>& a) -> VertexSet {
        const int n = st->g.n();
        if (n <= st->exact_limit) return max_weight_independent_set(st->g, a);
        ++st->calls;
        const double rho_eff = effective_rho(st->ordering.rho);
        const std::vector<int> order = st->ordering.by_rank();
        VertexSet best;
        double best_val = 0.0;
        for (int retry = 0; retry < 64; ++retry) {
            const Rng stream = st->base.fork(st->calls, static_cast<uint64_t>(retry));
            std::vector<char> kept(n, 0);
            for (size_t i = 0; i < order.size(); ++i) {
                const int v = order[i];
                if (!stream.fork(v).bernoulli(clamp01(st->x[v]) / (4.0 * rho_eff))) continue;
                double backward = 0.0;
                for (size_t j = 0; j < i; ++j)
                    if (kept[order[j]]) backward += symmetric_weight(st->g, order[j], v);
                if (backward < 0.5) kept[v] = 1;
            }
            for (int v : order) {
                if (!kept[v]) continue;
                double incoming = 0.0;
                for (int u = 0; u < n; ++u)
                    if (u != v && kept[u]) incoming += st->g.weight(u, v);
                if (incoming >= 1.0) kept[v] = 0;
            }
            double val = 0.0;
            VertexSet set;
            for (int v = 0; v < n; ++v)
                if (kept[v]) {
                    set.push_back(v);
                    val += a[v];
                }
            if (val > best_val) {
                best_val = val;
                best = std::move(set);
            }
        }
        return best;
    };
}

Decomposition decompose_channel(const ConflictGraph& g, const Ordering& ordering,
                                const std::vector<double>& x_col, double alpha_start,
                                const ChannelOracle& oracle, const DecomposeOptions& opts) {
    const int n = g.n();
    if (static_cast<int>(x_col.size()) != n) throw size_error("fractional point length mismatch");
    if (!(alpha_start > 0.0)) throw parameter_error("alpha must be positive");
    for (double x : x_col)
        if (x < -1e-9 || x > 1.0 + 1e-9) throw domain_error("fractional point outside [0, 1]");
    if (static_cast<int>(ordering.position.size()) != n)
        throw size_error("ordering length mismatch");

    std::vector<int> users;
    for (int v = 0; v < n; ++v)
        if (clamp01(x_col[v]) > kMassFloor) users.push_back(v);
    const int m = static_cast<int>(users.size());
    if (m == 0) return {{{1.0, empty_allocation(n)}}, alpha_start};
    std::vector<int> row_of_user(n, -1);
    for (int r = 0; r < m; ++r) row_of_user[users[r]] = r;

    auto singleton = [&](int r) {
        Allocation out = empty_allocation(n);
        out.sets[users[r]] = 1;
        return out;
    };
    auto owner = [&](int r) { return users[r]; };
    auto column_oracle = [&](const std::vector<double>& a_rows) {
        std::vector<double> full(n, 0.0);
        for (int r = 0; r < m; ++r) full[users[r]] = a_rows[r];
        const VertexSet set = oracle(full);
        if (!is_independent(g, set))
            throw decomposition_error("separation oracle returned a dependent set");
        GenColumn col;
        col.outcome = empty_allocation(n);
        for (int v : set) {
            if (row_of_user[v] < 0) continue;
            col.rows.push_back(row_of_user[v]);
            col.outcome.sets[v] = 1;
        }
        std::sort(col.rows.begin(), col.rows.end());
        return col;
    };

    std::vector<GenColumn> pool;
    for (int r = 0; r < m; ++r) pool.push_back(GenColumn{{r}, singleton(r)});

    for (int doubling = 0;; ++doubling) {
        const double alpha = alpha_start * std::ldexp(1.0, doubling);
        std::vector<double> xt(m);
        for (int r = 0; r < m; ++r) xt[r] = clamp01(x_col[users[r]]) / alpha;
        EngineOutcome eo = generate_columns(m, xt, pool, column_oracle, singleton, opts.master_tol);
        if (eo.theta <= 1.0 + 1e-9) {
            Decomposition dec;
            dec.entries = assemble_entries(n, m, xt, std::move(eo.cover), owner);
            dec.alpha_achieved = alpha;
            const DecompositionReport check = verify_channel_decomposition(g, dec, x_col, alpha);
            if (!check.ok)
                throw decomposition_error("internal decomposition check failed: " + check.detail);
            return dec;
        }
        if (!opts.allow_doubling || doubling >= opts.max_doublings)
            throw decomposition_error(dual_witness_message(alpha, eo.theta, eo.duals));
    }
}

Decomposition decompose_count_solution(const Instance& inst, const std::vector<double>& x,
                                       double alpha_start, const Rng& rng,
                                       const DecomposeOptions& opts) {
    const int n = inst.n();
    const int k = inst.k;
    if (static_cast<int>(x.size()) != n * k) throw size_error("count point length mismatch");
    if (!(alpha_start > 0.0)) throw parameter_error("alpha must be positive");
    if (!all_symmetric(inst)) throw mode_error("count decomposition requires symmetric valuations");
    for (double v : x)
        if (v < -1e-9 || v > 1.0 + 1e-9) throw domain_error("count point outside [0, 1]");

    const ConflictGraph& g = inst.graph.graph;
    const Ordering& ordering = inst.graph.ordering;

    struct RowKey {
        int user;
        int count;
    };
    std::vector<RowKey> rows;
    std::vector<std::vector<int>> row_of(n, std::vector<int>(k + 1, -1));
    for (int v = 0; v < n; ++v)
        for (int i = 1; i <= k; ++i)
            if (clamp01(x[count_var(v, i, k)]) > kMassFloor) {
                row_of[v][i] = static_cast<int>(rows.size());
                rows.push_back({v, i});
            }
    const int m = static_cast<int>(rows.size());
    if (m == 0) return {{{1.0, empty_allocation(n)}}, alpha_start};

    auto singleton = [&](int r) {
        Allocation out = empty_allocation(n);
        out.sets[rows[r].user] = (ChannelSet{1} << rows[r].count) - 1;
        return out;
    };
    auto owner = [&](int r) { return rows[r].user; };
    auto normalize = [&](Allocation alloc) {
        GenColumn col;
        for (int v = 0; v < n; ++v) {
            const int c = std::popcount(alloc.sets[v]);
            if (c == 0) continue;
            const int r = row_of[v][c];
            if (r < 0)
                alloc.sets[v] = 0;
            else
                col.rows.push_back(r);
        }
        std::sort(col.rows.begin(), col.rows.end());
        col.outcome = std::move(alloc);
        return col;
    };

    // Exact separation enumerates per-channel independent sets in
    // nondecreasing index order (channels are interchangeable for count
    // objectives); the tuple budget keeps it to small instances.
    std::vector<uint32_t> indep_masks;
    bool exact = n <= 14 && k >= 1;
    if (exact) {
        for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask)
            if (is_independent_mask(g, mask)) indep_masks.push_back(mask);
        double tuples = 1.0;
        for (int j = 0; j < k; ++j)
            tuples *= (static_cast<double>(indep_masks.size()) + j) / (j + 1);
        exact = tuples <= 300000.0;
    }

    const double rho_eff = effective_rho(ordering.rho);
    auto call_counter = std::make_shared<uint64_t>(0);

    auto column_oracle = [&, call_counter](const std::vector<double>& a_rows) {
        auto a_of = [&](int v, int c) {
            if (c < 1 || c > k) return 0.0;
            const int r = row_of[v][c];
            return r < 0 ? 0.0 : a_rows[r];
        };
        if (exact) {
            std::vector<int> counts(n, 0);
            std::vector<uint32_t> pick(k, 0);
            std::vector<uint32_t> best_pick(k, 0);
            double best_val = 0.0;
            std::function<void(int, size_t)> dfs = [&](int j, size_t from) {
                if (j == k) {
                    double val = 0.0;
                    for (int v = 0; v < n; ++v)
                        if (counts[v] > 0) val += a_of(v, counts[v]);
                    if (val > best_val) {
                        best_val = val;
                        best_pick = pick;
                    }
                    return;
                }
                for (size_t mi = from; mi < indep_masks.size(); ++mi) {
                    pick[j] = indep_masks[mi];
                    for (int v = 0; v < n; ++v)
                        if (indep_masks[mi] >> v & 1u) ++counts[v];
                    dfs(j + 1, mi);
                    for (int v = 0; v < n; ++v)
                        if (indep_masks[mi] >> v & 1u) --counts[v];
                }
            };
            dfs(0, 0);
            Allocation alloc = empty_allocation(n);
            for (int j = 0; j < k; ++j)
                for (int v = 0; v < n; ++v)
                    if (best_pick[j] >> v & 1u) alloc.sets[v] |= ChannelSet{1} << j;
            return normalize(std::move(alloc));
        }

        // Randomized separation: solve the count relaxation under the dual
        // objective, then round several keyed times and keep the best column.
        ++*call_counter;
        PackingLp lp = build_symmetric_lp(inst);
        for (int v = 0; v < n; ++v)
            for (int i = 1; i <= k; ++i) lp.objective[count_var(v, i, k)] = a_of(v, i);
        const LpSolution sol = solve_packing_lp(lp, 1e-9);

        auto column_value = [&](const Allocation& alloc) {
            double val = 0.0;
            for (int v = 0; v < n; ++v) {
                const int c = std::popcount(alloc.sets[v]);
                if (c > 0) val += a_of(v, c);
            }
            return val;
        };

        Allocation best = empty_allocation(n);
        double best_val = 0.0;
        const ChannelSet full = (ChannelSet{1} << k) - 1;
        for (int seed_idx = 0; seed_idx < 16; ++seed_idx) {
            const Rng trial = rng.fork(*call_counter, static_cast<uint64_t>(seed_idx));
            if (g.unweighted()) {
                auto halves = split_counts(sol.x, n, k, k / 2);
                for (int half = 0; half < 2; ++half) {
                    const std::vector<double>& part = half == 0 ? halves.first : halves.second;
                    const std::vector<int> d =
                        sample_demands(part, n, k, rho_eff, 4.0, trial.fork(half));
                    Allocation alloc = empty_allocation(n);
                    for (int v : ordering.by_rank()) {
                        if (d[v] == 0) continue;
                        ChannelSet used = 0;
                        for (int u : earlier_neighbors(g, ordering, v)) used |= alloc.sets[u];
                        ChannelSet free = full & ~used;
                        if (std::popcount(free) < d[v]) continue;
                        ChannelSet take = 0;
                        for (int j = 0, need = d[v]; j < k && need > 0; ++j)
                            if (free >> j & 1u) {
                                take |= ChannelSet{1} << j;
                                --need;
                            }
                        alloc.sets[v] = take;
                    }
                    const double val = column_value(alloc);
                    if (val > best_val) {
                        best_val = val;
                        best = alloc;
                    }
                }
            } else {
                auto halves = split_counts(sol.x, n, k, k / 8);
                for (int half = 0; half < 2; ++half) {
                    const std::vector<double>& part = half == 0 ? halves.first : halves.second;
                    std::vector<int> d = sample_demands(part, n, k, rho_eff, 64.0, trial.fork(half));
                    apply_zeroing(g, ordering, d, k);
                    std::vector<double> rv(n, 0.0);
                    for (int v = 0; v < n; ++v)
                        if (d[v] > 0) rv[v] = a_of(v, d[v]);
                    const Allocation alloc =
                        half == 0 ? allocate_small(g, ordering, d, k, rv, trial.fork(100 + half))
                                  : allocate_large(g, ordering, d, k, rv);
                    const double val = column_value(alloc);
                    if (val > best_val) {
                        best_val = val;
                        best = alloc;
                    }
                }
            }
        }
        return normalize(std::move(best));
    };

    std::vector<GenColumn> pool;
    for (int r = 0; r < m; ++r) pool.push_back(GenColumn{{r}, singleton(r)});

    for (int doubling = 0;; ++doubling) {
        const double alpha = alpha_start * std::ldexp(1.0, doubling);
        std::vector<double> xt(m);
        for (int r = 0; r < m; ++r)
            xt[r] = clamp01(x[count_var(rows[r].user, rows[r].count, k)]) / alpha;
        EngineOutcome eo = generate_columns(m, xt, pool, column_oracle, singleton, opts.master_tol);
        if (eo.theta <= 1.0 + 1e-9) {
            Decomposition dec;
            dec.entries = assemble_entries(n, m, xt, std::move(eo.cover), owner);
            dec.alpha_achieved = alpha;
            const DecompositionReport check = verify_count_decomposition(inst, dec, x, alpha);
            if (!check.ok)
                throw decomposition_error("internal decomposition check failed: " + check.detail);
            return dec;
        }
        if (!opts.allow_doubling || doubling >= opts.max_doublings)
            throw decomposition_error(dual_witness_message(alpha, eo.theta, eo.duals));
    }
}

DecompositionReport verify_channel_decomposition(const ConflictGraph& g, const Decomposition& dec,
                                                 const std::vector<double>& x_col, double alpha) {
    const int n = g.n();
    DecompositionReport report = verify_common(dec.entries);
    if (static_cast<int>(x_col.size()) != n) throw size_error("fractional point length mismatch");
    std::vector<double> marginal(n, 0.0);
    for (const auto& e : dec.entries) {
        if (static_cast<int>(e.outcome.sets.size()) != n) {
            report.ok = false;
            report.detail = "outcome size mismatch";
            return report;
        }
        VertexSet set;
        for (int v = 0; v < n; ++v) {
            if (e.outcome.sets[v] == 0) continue;
            if (e.outcome.sets[v] != 1) {
                report.ok = false;
                report.detail = "channel-form outcome uses extra channels";
                return report;
            }
            set.push_back(v);
            marginal[v] += e.lambda;
        }
        if (!is_independent(g, set)) {
            report.ok = false;
            report.detail = "dependent outcome";
            return report;
        }
    }
    for (int v = 0; v < n; ++v) {
        const double err = std::abs(marginal[v] - clamp01(x_col[v]) / alpha);
        report.max_marginal_error = std::max(report.max_marginal_error, err);
    }
    if (report.max_marginal_error > 1e-7) {
        report.ok = false;
        if (report.detail.empty()) report.detail = "marginal mismatch";
    }
    return report;
}

DecompositionReport verify_count_decomposition(const Instance& inst, const Decomposition& dec,
                                               const std::vector<double>& x, double alpha) {
    const int n = inst.n();
    const int k = inst.k;
    DecompositionReport report = verify_common(dec.entries);
    if (static_cast<int>(x.size()) != n * k) throw size_error("count point length mismatch");
    std::vector<double> marginal(static_cast<size_t>(n) * (k + 1), 0.0);
    for (const auto& e : dec.entries) {
        if (static_cast<int>(e.outcome.sets.size()) != n) {
            report.ok = false;
            report.detail = "outcome size mismatch";
            return report;
        }
        if (!allocation_feasible(inst.graph.graph, k, e.outcome)) {
            report.ok = false;
            report.detail = "infeasible outcome";
            return report;
        }
        for (int v = 0; v < n; ++v)
            marginal[static_cast<size_t>(v) * (k + 1) + e.outcome.count(v)] += e.lambda;
    }
    for (int v = 0; v < n; ++v)
        for (int i = 1; i <= k; ++i) {
            const double target = clamp01(x[count_var(v, i, k)]) / alpha;
            const double err = std::abs(marginal[static_cast<size_t>(v) * (k + 1) + i] - target);
            report.max_marginal_error = std::max(report.max_marginal_error, err);
        }
    if (report.max_marginal_error > 1e-7) {
        report.ok = false;
        if (report.detail.empty()) report.detail = "marginal mismatch";
    }
    return report;
}

}  // namespace specauction
