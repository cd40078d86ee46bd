#include "specauction/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "specauction/errors.hpp"

namespace specauction {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_lp(const PackingLp& lp) {
    if (lp.num_vars < 0) throw domain_error("negative variable count");
    if (static_cast<int>(lp.objective.size()) != lp.num_vars ||
        static_cast<int>(lp.upper.size()) != lp.num_vars)
        throw domain_error("objective/upper size mismatch");
    for (double u : lp.upper)
        if (!(u > 0.0)) throw domain_error("upper bounds must be positive (or +inf)");
    for (const auto& row : lp.rows) {
        if (!(row.rhs >= 0.0) || !std::isfinite(row.rhs))
            throw domain_error("row rhs must be finite and >= 0");
        for (auto [j, a] : row.terms) {
            if (j < 0 || j >= lp.num_vars) throw domain_error("row term out of range");
            if (!(a >= 0.0) || !std::isfinite(a)) throw domain_error("row coefficient < 0");
        }
    }
}

// Bounded-variable primal simplex over structural columns plus one slack per
// row. Dense basis inverse with periodic refactorization; Dantzig pricing
// with a permanent switch to Bland's rule after a degenerate streak.
class Simplex {
  public:
    Simplex(const PackingLp& lp, double tol) : lp_(lp), tol_(tol) {
        m_ = static_cast<int>(lp.rows.size());
        n_ = lp.num_vars;
        total_ = n_ + m_;
        scale_.assign(m_, 1.0);
        for (int r = 0; r < m_; ++r) {
            double mx = std::abs(lp.rows[r].rhs);
            for (auto [j, a] : lp.rows[r].terms) mx = std::max(mx, std::abs(a));
            if (mx > 0.0) scale_[r] = mx;
        }
        rhs_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) rhs_[r] = lp.rows[r].rhs / scale_[r];
        cols_.assign(total_, {});
        for (int r = 0; r < m_; ++r)
            for (auto [j, a] : lp.rows[r].terms)
                if (a != 0.0) cols_[j].push_back({r, a / scale_[r]});
        for (int r = 0; r < m_; ++r) cols_[n_ + r].push_back({r, 1.0});
        cost_.assign(total_, 0.0);
        for (int j = 0; j < n_; ++j) cost_[j] = lp.objective[j];
        ub_.assign(total_, kInf);
        for (int j = 0; j < n_; ++j) ub_[j] = lp.upper[j];

        basis_.resize(m_);
        for (int r = 0; r < m_; ++r) basis_[r] = n_ + r;
        basic_row_.assign(total_, -1);
        for (int r = 0; r < m_; ++r) basic_row_[n_ + r] = r;
        at_upper_.assign(total_, 0);
        binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) binv_[static_cast<size_t>(r) * m_ + r] = 1.0;
        xb_ = rhs_;
    }

    LpSolution solve() {
        double price_tol = 1e-10 * (1.0 + max_abs_cost());
        const double floor_tol = 1e-13 * (1.0 + max_abs_cost());
        for (;;) {
            run_pivots(price_tol);
            LpSolution sol = extract();
            double budget = tol_ * std::max(1.0, std::abs(sol.objective_value));
            if (sol.gap <= budget && sol.gap >= -budget) return sol;
            if (price_tol <= floor_tol) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "simplex could not certify gap: gap=%.3e budget=%.3e", sol.gap,
                              budget);
                throw solver_error(buf);
            }
            price_tol = std::max(floor_tol, price_tol * 1e-2);
        }
    }

  private:
    struct Entry {
        int row;
        double a;
    };

    double max_abs_cost() const {
        double mx = 0.0;
        for (int j = 0; j < n_; ++j) mx = std::max(mx, std::abs(cost_[j]));
        return mx;
    }

    std::vector<double> dual_prices() const {
        std::vector<double> y(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double cb = cost_[basis_[r]];
            if (cb == 0.0) continue;
            const double* row = &binv_[static_cast<size_t>(r) * m_];
            for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
        }
        return y;
    }

    double reduced_cost(int j, const std::vector<double>& y) const {
        double d = cost_[j];
        for (const Entry& e : cols_[j]) d -= y[e.row] * e.a;
        return d;
    }

    std::vector<double> ftran(int j) const {
        std::vector<double> t(m_, 0.0);
        for (const Entry& e : cols_[j]) {
            for (int r = 0; r < m_; ++r) t[r] += binv_[static_cast<size_t>(r) * m_ + e.row] * e.a;
        }
        return t;
    }

    void refactor() {
        // Gauss-Jordan inverse of the basis matrix, then recompute xb.
        std::vector<double> mat(static_cast<size_t>(m_) * 2 * m_, 0.0);
        auto at = [&](int r, int c) -> double& { return mat[static_cast<size_t>(r) * 2 * m_ + c]; };
        for (int c = 0; c < m_; ++c)
            for (const Entry& e : cols_[basis_[c]]) at(e.row, c) = e.a;
        for (int r = 0; r < m_; ++r) at(r, m_ + r) = 1.0;
        for (int c = 0; c < m_; ++c) {
            int piv = c;
            for (int r = c + 1; r < m_; ++r)
                if (std::abs(at(r, c)) > std::abs(at(piv, c))) piv = r;
            if (std::abs(at(piv, c)) < 1e-12) throw solver_error("singular basis");
            if (piv != c)
                for (int x = 0; x < 2 * m_; ++x) std::swap(at(piv, x), at(c, x));
            double inv = 1.0 / at(c, c);
            for (int x = 0; x < 2 * m_; ++x) at(c, x) *= inv;
            for (int r = 0; r < m_; ++r) {
                if (r == c || at(r, c) == 0.0) continue;
                double f = at(r, c);
                for (int x = 0; x < 2 * m_; ++x) at(r, x) -= f * at(c, x);
            }
        }
        for (int r = 0; r < m_; ++r)
            for (int c = 0; c < m_; ++c) binv_[static_cast<size_t>(r) * m_ + c] = at(r, m_ + c);
        recompute_xb();
    }

    void recompute_xb() {
        std::vector<double> net = rhs_;
        for (int j = 0; j < total_; ++j) {
            if (basic_row_[j] >= 0 || !at_upper_[j]) continue;
            for (const Entry& e : cols_[j]) net[e.row] -= e.a * ub_[j];
        }
        for (int r = 0; r < m_; ++r) {
            double v = 0.0;
            const double* row = &binv_[static_cast<size_t>(r) * m_];
            for (int i = 0; i < m_; ++i) v += row[i] * net[i];
            xb_[r] = v;
        }
    }

    void run_pivots(double price_tol) {
        const int pivot_limit = 20000 + 500 * (m_ + n_);
        int degenerate_streak = 0;
        bool bland = false;
        int since_refactor = 0;
        for (;;) {
            std::vector<double> y = dual_prices();
            int enter = -1;
            double best = price_tol;
            for (int j = 0; j < total_; ++j) {
                if (basic_row_[j] >= 0) continue;
                double d = reduced_cost(j, y);
                double score = at_upper_[j] ? -d : d;
                if (score <= price_tol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (score > best) {
                    best = score;
                    enter = j;
                }
            }
            if (enter < 0) return;
            if (pivots_ >= pivot_limit) throw solver_error("simplex pivot limit exceeded");

            const double sigma = at_upper_[enter] ? -1.0 : 1.0;
            std::vector<double> t = ftran(enter);
            // ratio test; ties go to the first (smallest) basis row
            double step = ub_[enter];  // own-bound flip distance
            int leave_row = -1;
            bool leave_to_upper = false;
            for (int r = 0; r < m_; ++r) {
                double w = sigma * t[r];
                double lim;
                bool to_upper;
                if (w > 1e-11) {
                    lim = std::max(xb_[r], 0.0) / w;
                    to_upper = false;
                } else if (w < -1e-11 && ub_[basis_[r]] < kInf) {
                    lim = std::max(ub_[basis_[r]] - xb_[r], 0.0) / (-w);
                    to_upper = true;
                } else {
                    continue;
                }
                if (lim < step - 1e-13) {
                    step = lim;
                    leave_row = r;
                    leave_to_upper = to_upper;
                }
            }
            if (leave_row < 0 && !(step < kInf)) throw solver_error("unbounded packing LP");

            ++pivots_;
            ++since_refactor;
            if (step < 1e-12) {
                if (++degenerate_streak > 2 * (m_ + n_)) bland = true;
            } else {
                degenerate_streak = 0;
            }

            for (int r = 0; r < m_; ++r) xb_[r] -= sigma * t[r] * step;
            if (leave_row < 0) {
                at_upper_[enter] = !at_upper_[enter];  // bound flip
                continue;
            }
            int leave = basis_[leave_row];
            basic_row_[leave] = -1;
            at_upper_[leave] = leave_to_upper;
            basis_[leave_row] = enter;
            basic_row_[enter] = leave_row;
            xb_[leave_row] = at_upper_[enter] ? ub_[enter] - step : step;
            at_upper_[enter] = 0;

            double piv = t[leave_row];
            if (std::abs(piv) < 1e-12) {
                refactor();
                since_refactor = 0;
                continue;
            }
            double* prow = &binv_[static_cast<size_t>(leave_row) * m_];
            double inv = 1.0 / piv;
            for (int i = 0; i < m_; ++i) prow[i] *= inv;
            for (int r = 0; r < m_; ++r) {
                if (r == leave_row || t[r] == 0.0) continue;
                double f = t[r];
                double* row = &binv_[static_cast<size_t>(r) * m_];
                for (int i = 0; i < m_; ++i) row[i] -= f * prow[i];
            }
            if (since_refactor >= 64) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    LpSolution extract() {
        refactor();
        LpSolution sol;
        sol.pivots = pivots_;
        sol.x.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j)
            if (basic_row_[j] < 0 && at_upper_[j]) sol.x[j] = ub_[j];
        for (int r = 0; r < m_; ++r) {
            int j = basis_[r];
            if (j >= n_) continue;
            double hi = ub_[j] < kInf ? ub_[j] : std::max(xb_[r], 0.0);
            sol.x[j] = std::clamp(xb_[r], 0.0, hi);
        }
        double primal = 0.0;
        for (int j = 0; j < n_; ++j) primal += cost_[j] * sol.x[j];
        sol.objective_value = primal;

        std::vector<double> y = dual_prices();
        sol.dual_rows.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) sol.dual_rows[r] = std::max(0.0, y[r]) / scale_[r];
        sol.dual_upper.assign(n_, 0.0);
        double dual = 0.0;
        for (int r = 0; r < m_; ++r) dual += sol.dual_rows[r] * lp_.rows[r].rhs;
        for (int j = 0; j < n_; ++j) {
            double slack_cost = cost_[j];
            for (const Entry& e : cols_[j])
                slack_cost -= std::max(0.0, y[e.row]) * e.a;
            double z = std::max(0.0, slack_cost);
            if (z > 0.0) {
                if (ub_[j] == kInf) {
                    // dual infeasible at this tolerance; report an honest gap
                    dual += z * 1e30;
                } else {
                    dual += z * ub_[j];
                }
            }
            sol.dual_upper[j] = z;
        }
        sol.gap = dual - primal;
        return sol;
    }

    const PackingLp& lp_;
    double tol_;
    int m_ = 0, n_ = 0, total_ = 0;
    std::vector<double> scale_, rhs_, cost_, ub_, xb_, binv_;
    std::vector<std::vector<Entry>> cols_;
    std::vector<int> basis_, basic_row_;
    std::vector<char> at_upper_;
    int pivots_ = 0;
};

}  // namespace

LpSolution solve_packing_lp(const PackingLp& lp, double tol) {
    validate_lp(lp);
    if (!(tol > 0.0)) throw parameter_error("LP tolerance must be positive");
    if (lp.num_vars == 0) {
        LpSolution sol;
        sol.dual_rows.assign(lp.rows.size(), 0.0);
        return sol;
    }
    Simplex simplex(lp, tol);
    return simplex.solve();
}

FeasibilityReport check_lp_feasible(const PackingLp& lp, const std::vector<double>& x,
                                    double tol) {
    validate_lp(lp);
    char buf[160];
    if (static_cast<int>(x.size()) != lp.num_vars) return {false, "point has wrong dimension"};
    for (int j = 0; j < lp.num_vars; ++j) {
        if (x[j] < -tol || x[j] > lp.upper[j] + tol) {
            std::snprintf(buf, sizeof buf, "variable %d out of bounds: %.17g", j, x[j]);
            return {false, buf};
        }
    }
    for (size_t r = 0; r < lp.rows.size(); ++r) {
        double lhs = 0.0;
        for (auto [j, a] : lp.rows[r].terms) lhs += a * x[j];
        if (lhs > lp.rows[r].rhs + tol * std::max(1.0, std::abs(lp.rows[r].rhs))) {
            std::snprintf(buf, sizeof buf, "row %zu violated: lhs=%.17g rhs=%.17g", r, lhs,
                          lp.rows[r].rhs);
            return {false, buf};
        }
    }
    return {true, ""};
}

namespace {

std::string var_name(const PackingLp& lp, int j) {
    if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty())
        return lp.var_names[j];
    return "x" + std::to_string(j);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_lp_text(std::ostream& os, const PackingLp& lp, const std::string& name) {
    os << "\\ " << name << "\nMaximize\n obj:";
    bool first = true;
    for (int j = 0; j < lp.num_vars; ++j) {
        if (lp.objective[j] == 0.0) continue;
        os << (first ? " " : " + ") << fmt(lp.objective[j]) << " " << var_name(lp, j);
        first = false;
    }
    if (first) os << " 0 " << var_name(lp, 0);
    os << "\nSubject To\n";
    for (size_t r = 0; r < lp.rows.size(); ++r) {
        os << " " << (lp.rows[r].name.empty() ? "r" + std::to_string(r) : lp.rows[r].name) << ":";
        bool f2 = true;
        for (auto [j, a] : lp.rows[r].terms) {
            os << (f2 ? " " : " + ") << fmt(a) << " " << var_name(lp, j);
            f2 = false;
        }
        if (f2) os << " 0 " << var_name(lp, 0);
        os << " <= " << fmt(lp.rows[r].rhs) << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        if (lp.upper[j] == kInf)
            os << " " << var_name(lp, j) << " >= 0\n";
        else
            os << " 0 <= " << var_name(lp, j) << " <= " << fmt(lp.upper[j]) << "\n";
    }
    os << "End\n";
}

PackingLp build_symmetric_lp(const Instance& inst) {
    validate_instance(inst);
    if (!all_symmetric(inst)) throw mode_error("count-form LP requires symmetric valuations");
    const int n = inst.n();
    const int k = inst.k;
    const auto& g = inst.graph.graph;
    const auto& position = inst.graph.ordering.position;
    const double rho = inst.graph.ordering.rho;

    PackingLp lp;
    lp.num_vars = n * k;
    lp.objective.assign(lp.num_vars, 0.0);
    lp.upper.assign(lp.num_vars, 1.0);
    lp.var_names.resize(lp.num_vars);
    for (int v = 0; v < n; ++v) {
        for (int i = 1; i <= k; ++i) {
            lp.objective[count_var(v, i, k)] = value_count(inst.valuations[v], i);
            lp.var_names[count_var(v, i, k)] =
                "x_" + std::to_string(v) + "_" + std::to_string(i);
        }
    }
    for (int v = 0; v < n; ++v) {
        PackingLp::Row row;
        row.name = "intf_" + std::to_string(v);
        row.rhs = rho * k;
        for (int u = 0; u < n; ++u) {
            if (u == v || position[u] >= position[v]) continue;
            double wbar = symmetric_weight(g, u, v);
            if (wbar == 0.0) continue;
            for (int i = 1; i <= k; ++i) row.terms.push_back({count_var(u, i, k), i * wbar});
        }
        if (!row.terms.empty()) lp.rows.push_back(std::move(row));
    }
    for (int v = 0; v < n; ++v) {
        PackingLp::Row row;
        row.name = "assign_" + std::to_string(v);
        row.rhs = 1.0;
        for (int i = 1; i <= k; ++i) row.terms.push_back({count_var(v, i, k), 1.0});
        if (!row.terms.empty()) lp.rows.push_back(std::move(row));
    }
    return lp;
}

PackingLp build_single_channel_lp(const ConflictGraph& g, const Ordering& ordering,
                                  const std::vector<double>& weights) {
    if (static_cast<int>(weights.size()) != g.n())
        throw domain_error("one weight required per user");
    for (double a : weights)
        if (!(a >= 0.0) || !std::isfinite(a)) throw domain_error("weights must be >= 0");
    PackingLp lp;
    lp.num_vars = g.n();
    lp.objective = weights;
    lp.upper.assign(g.n(), 1.0);
    for (int v = 0; v < g.n(); ++v) {
        PackingLp::Row row;
        row.name = "intf_" + std::to_string(v);
        row.rhs = ordering.rho;
        for (int u = 0; u < g.n(); ++u) {
            if (u == v || ordering.position[u] >= ordering.position[v]) continue;
            double wbar = symmetric_weight(g, u, v);
            if (wbar != 0.0) row.terms.push_back({u, wbar});
        }
        if (!row.terms.empty()) lp.rows.push_back(std::move(row));
    }
    return lp;
}

CountLpSolution solve_count_lp(const Instance& inst, double tol,
                               const std::vector<double>* user_scale) {
    PackingLp lp = build_symmetric_lp(inst);
    if (user_scale) {
        if (static_cast<int>(user_scale->size()) != inst.n())
            throw domain_error("user scale size mismatch");
        for (int v = 0; v < inst.n(); ++v) {
            if (!((*user_scale)[v] >= 0.0)) throw domain_error("user scale must be >= 0");
            for (int i = 1; i <= inst.k; ++i)
                lp.objective[count_var(v, i, inst.k)] *= (*user_scale)[v];
        }
    }
    LpSolution sol = solve_packing_lp(lp, tol);
    return {std::move(sol.x), sol.objective_value, sol.gap};
}

ChannelLpSolution solve_channel_lp(const ConflictGraph& g, const Ordering& ordering,
                                   const std::vector<double>& weights, double tol) {
    PackingLp lp = build_single_channel_lp(g, ordering, weights);
    LpSolution sol = solve_packing_lp(lp, tol);
    return {std::move(sol.x), sol.objective_value, sol.gap};
}

}  // namespace specauction
