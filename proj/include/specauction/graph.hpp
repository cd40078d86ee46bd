#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

namespace specauction {

using VertexSet = std::vector<int>;

// Directed edge-weighted conflict graph. weight(u, v) is the interference u
// imposes on v; the diagonal is identically zero. A set U is independent iff
// every member's incoming weight from the rest of U is strictly below 1.
// Unweighted graphs are the symmetric {0,1} special case and carry a flag so
// algorithms that require that class can enforce it.
class ConflictGraph {
  public:
    ConflictGraph() : ConflictGraph(0) {}
    explicit ConflictGraph(int n, bool unweighted = false);

    static ConflictGraph make_unweighted(int n, const std::vector<std::pair<int, int>>& edges);

    int n() const { return n_; }
    bool unweighted() const { return unweighted_; }

    double weight(int u, int v) const { return w_[static_cast<size_t>(u) * n_ + v]; }
    void set_weight(int u, int v, double w);
    // Undirected convenience for unweighted graphs.
    void add_edge(int u, int v);

    bool has_any_edge() const;

  private:
    int n_;
    bool unweighted_;
    std::vector<double> w_;
};

// Position map: position[v] in [0, n) is pi(v); rho is the claimed inductive
// independence bound for this ordering (any upper bound is admissible).
struct Ordering {
    std::vector<int> position;
    double rho = 0.0;

    // Vertices sorted by increasing position.
    std::vector<int> by_rank() const;
};

struct OrderedGraph {
    ConflictGraph graph;
    Ordering ordering;
};

// w(u,v) + w(v,u); u == v is a domain error.
double symmetric_weight(const ConflictGraph& g, int u, int v);

bool is_independent(const ConflictGraph& g, const VertexSet& set);
// Mask variant for n <= 32 hot paths.
bool is_independent_mask(const ConflictGraph& g, uint32_t mask);

// Earlier vertices u with symmetric_weight(u, v) >= 1. On unweighted graphs
// this is exactly the earlier adjacency set.
VertexSet earlier_neighbors(const ConflictGraph& g, const Ordering& ordering, int v);

enum class RhoMode { exact, bound };

// max over v of the heaviest independent subset of earlier vertices, weighted
// by symmetric weight into v. exact mode is a branch-and-bound search guarded
// at n <= 20; bound mode returns the unconditioned earlier-weight sum.
double rho_of_ordering(const ConflictGraph& g, const std::vector<int>& position,
                       RhoMode mode = RhoMode::exact);

struct RhoResult {
    double rho;
    Ordering ordering;  // witness attaining the minimum
};

// Minimum of rho_of_ordering over all n! orderings; guarded at n <= 9.
RhoResult exact_rho(const ConflictGraph& g);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Link {
    Point sender;
    Point receiver;
};

// Disk/protocol interference: unweighted edge iff distance <= radius.
// pi orders by nondecreasing degree, ties by vertex index.
OrderedGraph gen_protocol_model(const std::vector<Point>& points, double radius);

struct PhysicalParams {
    double pathloss = 3.0;        // > 2
    double sinr_threshold = 2.0;  // tau > 0
    double noise = 0.1;           // >= 0
    double weight_cap = 1.0e6;
};

// SINR/affectance weights with uniform transmit power:
//   w(u, v) = d(s_u, r_v)^-beta / (d(s_v, r_v)^-beta / tau - noise)
// clamped to [0, weight_cap]. Every link must be strictly feasible alone.
// pi orders by nondecreasing link length, ties by index.
OrderedGraph gen_physical_model(const std::vector<Link>& links, const PhysicalParams& params);

void to_json(nlohmann::json& j, const OrderedGraph& og);
void from_json(const nlohmann::json& j, OrderedGraph& og);

}  // namespace specauction
