#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "json.hpp"

namespace specauction {

// Channel subsets are bitmasks over 0-based channel indices.
using ChannelSet = uint32_t;

// values[i] is the worth of any i-channel bundle; values[0] == 0 and the
// sequence is nondecreasing (free disposal).
struct SymmetricValuation {
    std::vector<double> values;

    int k() const { return static_cast<int>(values.size()) - 1; }
};

struct UniformRank {
    int r = 0;
};

// blocks are disjoint channel groups; rank counts per-block hits up to cap.
struct PartitionRank {
    std::vector<std::vector<int>> blocks;
    std::vector<int> caps;
};

// covers[j] lists the ground elements channel j covers; the rank of T is the
// weight of the union of covers over T. Unit element weights give an
// integer-valued rank; general weights are the documented weighted extension
// (a weighted sum of rank-1 partition matroids, still matroid-rank-sum).
struct CoverageRank {
    std::vector<double> element_weights;
    std::vector<std::vector<int>> covers;
};

using RankDescriptor = std::variant<UniformRank, PartitionRank, CoverageRank>;

struct MrsTerm {
    double weight = 0.0;
    RankDescriptor rank;
};

// Weighted sum of matroid ranks: monotone and submodular by construction.
struct MrsValuation {
    std::vector<MrsTerm> terms;
};

using Valuation = std::variant<SymmetricValuation, MrsValuation>;

// Structural checks against channel count k; throws domain_error.
void validate_valuation(const Valuation& val, int k);

bool is_symmetric(const Valuation& val);

double value(const Valuation& val, int k, ChannelSet subset);

// Worth of an i-channel bundle; only defined for symmetric valuations.
double value_count(const Valuation& val, int count);

// Exact expectation of value(T) when channel j enters T independently with
// probability q[j]. Subset-enumeration semantics, computed through exact
// per-descriptor closed forms (Poisson-binomial tail sums, coverage
// products). Guarded at k <= 20.
double lottery_value(const Valuation& val, const std::vector<double>& q);

// Component j is E[value(T + j)] - E[value(T - j)], the multilinear partial.
std::vector<double> lottery_gradient(const Valuation& val, const std::vector<double>& q);

// Dense k*k Hessian of the multilinear extension, row-major. Diagonal is 0;
// off-diagonal entries are <= 0 for matroid-rank-sum valuations.
std::vector<double> lottery_hessian(const Valuation& val, const std::vector<double>& q);

void to_json(nlohmann::json& j, const Valuation& val);
void from_json(const nlohmann::json& j, Valuation& val);

}  // namespace specauction
