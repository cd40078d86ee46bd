#include "specauction/greedy.hpp"

#include <algorithm>
#include <cstddef>

#include "specauction/errors.hpp"

namespace specauction {

namespace {

void check_greedy_input(const ConflictGraph& g, const Ordering& ordering,
                        const std::vector<double>& bids) {
    if (!g.unweighted()) throw mode_error("greedy requires an unweighted graph");
    if (static_cast<int>(bids.size()) != g.n()) throw size_error("bid vector length mismatch");
    if (static_cast<int>(ordering.position.size()) != g.n())
        throw size_error("ordering length mismatch");
}

bool adjacent(const ConflictGraph& g, int u, int v) { return symmetric_weight(g, u, v) > 0.0; }

}  // namespace

LocalRatioResult local_ratio_greedy(const ConflictGraph& g, const Ordering& ordering,
                                    const std::vector<double>& bids) {
    check_greedy_input(g, ordering, bids);
    const int n = g.n();
    const std::vector<int> order = ordering.by_rank();

    std::vector<double> value = bids;
    std::vector<char> removed(n, 0);
    for (int idx = n - 1; idx >= 0; --idx) {
        const int v = order[idx];
        if (!(value[v] > 0.0)) {
            removed[v] = 1;
            continue;
        }
        for (int j = 0; j < idx; ++j) {
            const int u = order[j];
            if (adjacent(g, u, v)) value[u] -= value[v];
        }
    }

    std::vector<char> taken(n, 0);
    for (int idx = 0; idx < n; ++idx) {
        const int v = order[idx];
        if (removed[v]) continue;
        bool blocked = false;
        for (int u = 0; u < n && !blocked; ++u) blocked = taken[u] && adjacent(g, u, v);
        if (!blocked) taken[v] = 1;
    }

    LocalRatioResult result;
    result.residuals = std::move(value);
    for (int v = 0; v < n; ++v)
        if (taken[v]) result.chosen.push_back(v);
    return result;
}

VertexSet monotone_greedy(const ConflictGraph& g, const Ordering& ordering,
                          const std::vector<double>& bids) {
    check_greedy_input(g, ordering, bids);
    const int n = g.n();
    const std::vector<int> order = ordering.by_rank();

    std::vector<double> thresholds = bids;
    std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    VertexSet best;
    double best_welfare = 0.0;
    std::vector<char> taken(n, 0);
    for (double threshold : thresholds) {
        std::fill(taken.begin(), taken.end(), 0);
        double welfare = 0.0;
        for (int idx = 0; idx < n; ++idx) {
            const int v = order[idx];
            if (bids[v] < threshold) continue;
            bool blocked = false;
            for (int u = 0; u < n && !blocked; ++u) blocked = taken[u] && adjacent(g, u, v);
            if (blocked) continue;
            taken[v] = 1;
            welfare += bids[v];
        }
        if (welfare > best_welfare) {
            best_welfare = welfare;
            best.clear();
            for (int v = 0; v < n; ++v)
                if (taken[v]) best.push_back(v);
        }
    }
    return best;
}

}  // namespace specauction
