#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "specauction/instance.hpp"

namespace specauction {

// max c'x  s.t.  rows: a'x <= rhs (a >= 0, rhs >= 0),  0 <= x <= upper.
// upper entries may be +infinity.
struct PackingLp {
    struct Row {
        std::vector<std::pair<int, double>> terms;
        double rhs = 0.0;
        std::string name;
    };

    int num_vars = 0;
    std::vector<double> objective;
    std::vector<double> upper;
    std::vector<Row> rows;
    std::vector<std::string> var_names;  // optional; used by the text dump
};

// Primal point plus an explicit dual-feasible certificate:
//   gap = (rhs'dual_rows + upper'dual_upper) - c'x  >=  opt - c'x.
struct LpSolution {
    std::vector<double> x;
    double objective_value = 0.0;
    double gap = 0.0;
    std::vector<double> dual_rows;
    std::vector<double> dual_upper;
    int pivots = 0;
};

// Deterministic bounded-variable simplex. Fails with solver_error when the
// certified gap cannot be brought below tol * max(1, |objective|).
LpSolution solve_packing_lp(const PackingLp& lp, double tol = 1e-9);

struct FeasibilityReport {
    bool ok = true;
    std::string detail;
};

FeasibilityReport check_lp_feasible(const PackingLp& lp, const std::vector<double>& x, double tol);

// CPLEX-style LP text format (flag-gated CLI dump).
void write_lp_text(std::ostream& os, const PackingLp& lp, const std::string& name);

// Count-form relaxation for symmetric valuations. Variable (v, i) with
// i in [1, k] sits at index v*k + (i-1):
//   max  sum_v sum_i b_v(i) x_{v,i}
//   s.t. sum_{pi(u)<pi(v)} sum_i i * wbar(u,v) * x_{u,i} <= rho*k   (per v)
//        sum_i x_{v,i} <= 1                                        (per v)
//        0 <= x <= 1
PackingLp build_symmetric_lp(const Instance& inst);

inline int count_var(int v, int i, int k) { return v * k + (i - 1); }

// Single-channel weighted relaxation for nonnegative per-user weights a:
//   max  a'x  s.t.  sum_{pi(u)<pi(v)} wbar(u,v) x_u <= rho  (per v), 0<=x<=1.
PackingLp build_single_channel_lp(const ConflictGraph& g, const Ordering& ordering,
                                  const std::vector<double>& weights);

// Convenience wrappers returning solution + certificate.
struct CountLpSolution {
    std::vector<double> x;  // n*k, count_var layout
    double objective_value = 0.0;
    double gap = 0.0;
};

CountLpSolution solve_count_lp(const Instance& inst, double tol = 1e-9,
                               const std::vector<double>* user_scale = nullptr);

struct ChannelLpSolution {
    std::vector<double> x;  // per user
    double objective_value = 0.0;
    double gap = 0.0;
};

ChannelLpSolution solve_channel_lp(const ConflictGraph& g, const Ordering& ordering,
                                   const std::vector<double>& weights, double tol = 1e-9);

}  // namespace specauction
