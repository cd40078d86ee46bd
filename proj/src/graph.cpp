#include "specauction/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "specauction/errors.hpp"

namespace specauction {

namespace {

void check_vertex(const ConflictGraph& g, int v) {
    if (v < 0 || v >= g.n()) throw domain_error("vertex index out of range");
}

void check_position_map(int n, const std::vector<int>& position) {
    if (static_cast<int>(position.size()) != n)
        throw domain_error("ordering size does not match graph");
    std::vector<char> seen(n, 0);
    for (int p : position) {
        if (p < 0 || p >= n || seen[p]) throw domain_error("ordering is not a permutation");
        seen[p] = 1;
    }
}

}  // namespace

ConflictGraph::ConflictGraph(int n, bool unweighted) : n_(n), unweighted_(unweighted) {
    if (n < 0) throw domain_error("negative vertex count");
    w_.assign(static_cast<size_t>(n) * n, 0.0);
}

ConflictGraph ConflictGraph::make_unweighted(int n,
                                             const std::vector<std::pair<int, int>>& edges) {
    ConflictGraph g(n, true);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
}

void ConflictGraph::set_weight(int u, int v, double w) {
    check_vertex(*this, u);
    check_vertex(*this, v);
    if (u == v) throw domain_error("self-loop weight");
    if (!(w >= 0.0) || !std::isfinite(w)) throw domain_error("weight must be finite and >= 0");
    if (unweighted_ && w != 0.0 && w != 1.0)
        throw mode_error("unweighted graph only admits 0/1 weights");
    w_[static_cast<size_t>(u) * n_ + v] = w;
    if (unweighted_) w_[static_cast<size_t>(v) * n_ + u] = w;
}

void ConflictGraph::add_edge(int u, int v) {
    if (!unweighted_) throw mode_error("add_edge requires an unweighted graph");
    set_weight(u, v, 1.0);
}

bool ConflictGraph::has_any_edge() const {
    for (double w : w_)
        if (w != 0.0) return true;
    return false;
}

std::vector<int> Ordering::by_rank() const {
    std::vector<int> order(position.size());
    for (size_t v = 0; v < position.size(); ++v) order[position[v]] = static_cast<int>(v);
    return order;
}

double symmetric_weight(const ConflictGraph& g, int u, int v) {
    check_vertex(g, u);
    check_vertex(g, v);
    if (u == v) throw domain_error("symmetric weight of a vertex with itself");
    return g.weight(u, v) + g.weight(v, u);
}

bool is_independent(const ConflictGraph& g, const VertexSet& set) {
    for (int v : set) check_vertex(g, v);
    for (int v : set) {
        double incoming = 0.0;
        for (int u : set)
            if (u != v) incoming += g.weight(u, v);
        if (!(incoming < 1.0)) return false;  // strict, exact comparison
    }
    return true;
}

bool is_independent_mask(const ConflictGraph& g, uint32_t mask) {
    for (uint32_t bits = mask; bits;) {
        int v = std::countr_zero(bits);
        bits &= bits - 1;
        double incoming = 0.0;
        for (uint32_t rest = mask; rest;) {
            int u = std::countr_zero(rest);
            rest &= rest - 1;
            if (u != v) incoming += g.weight(u, v);
        }
        if (!(incoming < 1.0)) return false;
    }
    return true;
}

VertexSet earlier_neighbors(const ConflictGraph& g, const Ordering& ordering, int v) {
    check_vertex(g, v);
    check_position_map(g.n(), ordering.position);
    VertexSet result;
    for (int u = 0; u < g.n(); ++u) {
        if (u == v || ordering.position[u] >= ordering.position[v]) continue;
        if (symmetric_weight(g, u, v) >= 1.0) result.push_back(u);
    }
    return result;
}

namespace {

// Max-weight independent subset of `candidates` where candidate u contributes
// weight(u -> target). Branch and bound: candidates sorted by contribution,
// prune when the optimistic remainder cannot beat the incumbent.
class HeaviestIndependentSubset {
  public:
    HeaviestIndependentSubset(const ConflictGraph& g, int target,
                              const std::vector<int>& candidates)
        : g_(g) {
        for (int u : candidates) {
            double w = symmetric_weight(g, u, target);
            if (w > 0.0) items_.push_back({u, w});
        }
        std::sort(items_.begin(), items_.end(),
                  [](const Item& a, const Item& b) {
                      return a.w != b.w ? a.w > b.w : a.v < b.v;
                  });
        suffix_.assign(items_.size() + 1, 0.0);
        for (size_t i = items_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + items_[i].w;
    }

    double solve() {
        best_ = 0.0;
        chosen_.clear();
        incoming_.assign(g_.n(), 0.0);
        dfs(0, 0.0);
        return best_;
    }

  private:
    struct Item {
        int v;
        double w;
    };

    void dfs(size_t idx, double sum) {
        best_ = std::max(best_, sum);
        if (idx == items_.size() || sum + suffix_[idx] <= best_) return;
        const Item& it = items_[idx];
        // include, if the set stays independent
        double into_new = 0.0;
        bool ok = true;
        for (int m : chosen_) {
            into_new += g_.weight(m, it.v);
            if (!(incoming_[m] + g_.weight(it.v, m) < 1.0)) {
                ok = false;
                break;
            }
        }
        if (ok && into_new < 1.0) {
            for (int m : chosen_) incoming_[m] += g_.weight(it.v, m);
            incoming_[it.v] = into_new;
            chosen_.push_back(it.v);
            dfs(idx + 1, sum + it.w);
            chosen_.pop_back();
            for (int m : chosen_) incoming_[m] -= g_.weight(it.v, m);
        }
        dfs(idx + 1, sum);  // exclude
    }

    const ConflictGraph& g_;
    std::vector<Item> items_;
    std::vector<double> suffix_;
    std::vector<int> chosen_;
    std::vector<double> incoming_;
    double best_ = 0.0;
};

}  // namespace

double rho_of_ordering(const ConflictGraph& g, const std::vector<int>& position, RhoMode mode) {
    check_position_map(g.n(), position);
    if (mode == RhoMode::exact && g.n() > 20)
        throw size_error("exact rho_of_ordering guarded at n <= 20; use bound mode");
    double rho = 0.0;
    for (int v = 0; v < g.n(); ++v) {
        std::vector<int> earlier;
        for (int u = 0; u < g.n(); ++u)
            if (u != v && position[u] < position[v]) earlier.push_back(u);
        if (mode == RhoMode::bound) {
            double sum = 0.0;
            for (int u : earlier) sum += symmetric_weight(g, u, v);
            rho = std::max(rho, sum);
        } else {
            HeaviestIndependentSubset search(g, v, earlier);
            rho = std::max(rho, search.solve());
        }
    }
    return rho;
}

RhoResult exact_rho(const ConflictGraph& g) {
    const int n = g.n();
    if (n > 9) throw size_error("exact_rho guarded at n <= 9");
    if (n == 0) return {0.0, Ordering{{}, 0.0}};

    const uint32_t full = n >= 32 ? 0xffffffffu : ((1u << n) - 1);
    // best_into[v][mask]: heaviest independent subset of `mask` weighted into v.
    std::vector<std::vector<double>> best_into(n, std::vector<double>(full + 1, 0.0));
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> indep_weight(full + 1, -kInf);
    for (uint32_t mask = 0; mask <= full; ++mask)
        if (is_independent_mask(g, mask)) indep_weight[mask] = 0.0;
    for (int v = 0; v < n; ++v) {
        auto& tbl = best_into[v];
        for (uint32_t mask = 1; mask <= full; ++mask) {
            double own = -kInf;
            if (indep_weight[mask] == 0.0 && !(mask & (1u << v))) {
                own = 0.0;
                for (uint32_t bits = mask; bits;) {
                    int u = std::countr_zero(bits);
                    bits &= bits - 1;
                    own += symmetric_weight(g, u, v);
                }
            }
            double best = std::max(own, 0.0);
            for (uint32_t bits = mask; bits;) {
                uint32_t bit = bits & (0u - bits);
                bits &= bits - 1;
                best = std::max(best, tbl[mask ^ bit]);
            }
            tbl[mask] = best;
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    double best_rho = kInf;
    std::vector<int> best_order;
    do {
        double rho = 0.0;
        uint32_t earlier = 0;
        for (int v : order) {
            rho = std::max(rho, best_into[v][earlier]);
            if (rho >= best_rho) break;
            earlier |= 1u << v;
        }
        if (rho < best_rho) {
            best_rho = rho;
            best_order = order;
        }
    } while (std::next_permutation(order.begin(), order.end()));

    Ordering ordering;
    ordering.position.assign(n, 0);
    for (int rank = 0; rank < n; ++rank) ordering.position[best_order[rank]] = rank;
    ordering.rho = best_rho;
    return {best_rho, ordering};
}

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Ordering ordering_from_ranks(const ConflictGraph& g, std::vector<int> by_rank) {
    Ordering ordering;
    ordering.position.assign(g.n(), 0);
    for (int rank = 0; rank < g.n(); ++rank) ordering.position[by_rank[rank]] = rank;
    ordering.rho = g.n() <= 20 ? rho_of_ordering(g, ordering.position, RhoMode::exact)
                               : rho_of_ordering(g, ordering.position, RhoMode::bound);
    return ordering;
}

}  // namespace

OrderedGraph gen_protocol_model(const std::vector<Point>& points, double radius) {
    if (!(radius >= 0.0)) throw parameter_error("protocol radius must be >= 0");
    const int n = static_cast<int>(points.size());
    ConflictGraph g(n, true);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (dist(points[u], points[v]) <= radius) g.add_edge(u, v);

    std::vector<int> degree(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (g.weight(u, v) != 0.0) ++degree[u];
    std::vector<int> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::stable_sort(by_rank.begin(), by_rank.end(),
                     [&](int a, int b) { return degree[a] != degree[b] ? degree[a] < degree[b] : a < b; });
    return {g, ordering_from_ranks(g, std::move(by_rank))};
}

OrderedGraph gen_physical_model(const std::vector<Link>& links, const PhysicalParams& params) {
    if (!(params.pathloss > 2.0)) throw parameter_error("pathloss exponent must exceed 2");
    if (!(params.sinr_threshold > 0.0)) throw parameter_error("SINR threshold must be positive");
    if (!(params.noise >= 0.0)) throw parameter_error("noise must be >= 0");
    const int n = static_cast<int>(links.size());
    ConflictGraph g(n, false);
    std::vector<double> margin(n);  // admissible interference at receiver v
    for (int v = 0; v < n; ++v) {
        double len = dist(links[v].sender, links[v].receiver);
        if (!(len > 0.0)) throw domain_error("link with coincident endpoints");
        double signal = std::pow(len, -params.pathloss);
        margin[v] = signal / params.sinr_threshold - params.noise;
        if (!(margin[v] > 0.0)) throw domain_error("link infeasible even in isolation");
    }
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            double d = dist(links[u].sender, links[v].receiver);
            double interference =
                d > 0.0 ? std::pow(d, -params.pathloss) : std::numeric_limits<double>::infinity();
            double w = interference / margin[v];
            g.set_weight(u, v, std::clamp(w, 0.0, params.weight_cap));
        }
    }
    std::vector<double> length(n);
    for (int v = 0; v < n; ++v) length[v] = dist(links[v].sender, links[v].receiver);
    std::vector<int> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::stable_sort(by_rank.begin(), by_rank.end(), [&](int a, int b) {
        return length[a] != length[b] ? length[a] < length[b] : a < b;
    });
    return {g, ordering_from_ranks(g, std::move(by_rank))};
}

void to_json(nlohmann::json& j, const OrderedGraph& og) {
    const ConflictGraph& g = og.graph;
    nlohmann::json edges = nlohmann::json::array();
    for (int u = 0; u < g.n(); ++u) {
        for (int v = 0; v < g.n(); ++v) {
            if (g.weight(u, v) == 0.0) continue;
            if (g.unweighted() && u > v) continue;  // one entry per undirected edge
            edges.push_back({{"from", u}, {"to", v}, {"w", g.weight(u, v)}});
        }
    }
    j = nlohmann::json{{"n", g.n()},
                       {"unweighted", g.unweighted()},
                       {"edges", std::move(edges)},
                       {"pi", og.ordering.position},
                       {"rho", og.ordering.rho}};
}

void from_json(const nlohmann::json& j, OrderedGraph& og) {
    if (!j.is_object() || !j.contains("n") || !j.contains("unweighted") || !j.contains("edges") ||
        !j.contains("pi") || !j.contains("rho"))
        throw domain_error("graph object requires n, unweighted, edges, pi, rho");
    int n = j.at("n").get<int>();
    ConflictGraph g(n, j.at("unweighted").get<bool>());
    for (const auto& e : j.at("edges")) {
        int u = e.at("from").get<int>();
        int v = e.at("to").get<int>();
        double w = e.value("w", 1.0);
        if (g.unweighted()) {
            if (w != 1.0) throw domain_error("unweighted edge with weight != 1");
            g.add_edge(u, v);
        } else {
            g.set_weight(u, v, w);
        }
    }
    Ordering ordering;
    ordering.position = j.at("pi").get<std::vector<int>>();
    ordering.rho = j.at("rho").get<double>();
    check_position_map(n, ordering.position);
    if (!(ordering.rho >= 0.0)) throw domain_error("rho must be >= 0");
    og = {std::move(g), std::move(ordering)};
}

}  // namespace specauction
