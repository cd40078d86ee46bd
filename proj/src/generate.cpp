#include "specauction/generate.hpp"

#include <algorithm>
#include <functional>

#include "specauction/errors.hpp"
#include "specauction/graph.hpp"

namespace specauction {

SymmetricValuation random_symmetric_valuation(int k, const Rng& rng) {
    if (k < 1) throw parameter_error("need at least one channel");
    Rng local = rng.fork(0);
    std::vector<double> inc(k);
    for (int i = 0; i < k; ++i) inc[i] = 0.05 + local.next_double();
    if (local.bernoulli(0.5)) std::sort(inc.begin(), inc.end(), std::greater<>());
    const double scale = 0.5 + 9.5 * local.next_double();
    SymmetricValuation val;
    val.values.assign(k + 1, 0.0);
    for (int i = 1; i <= k; ++i) val.values[i] = val.values[i - 1] + scale * inc[i - 1];
    return val;
}

MrsValuation random_mrs_valuation(int k, const Rng& rng) {
    if (k < 1) throw parameter_error("need at least one channel");
    Rng local = rng.fork(1);
    MrsValuation val;
    const int terms = 1 + static_cast<int>(local.next_below(3));
    for (int t = 0; t < terms; ++t) {
        MrsTerm term;
        term.weight = 0.1 + 4.9 * local.next_double();
        switch (local.next_below(3)) {
            case 0: {
                term.rank = UniformRank{1 + static_cast<int>(local.next_below(k))};
                break;
            }
            case 1: {
                PartitionRank pr;
                const int blocks = 1 + static_cast<int>(local.next_below(k));
                pr.blocks.assign(blocks, {});
                for (int j = 0; j < k; ++j)
                    pr.blocks[local.next_below(blocks)].push_back(j);
                pr.blocks.erase(std::remove_if(pr.blocks.begin(), pr.blocks.end(),
                                               [](const auto& b) { return b.empty(); }),
                                pr.blocks.end());
                for (const auto& b : pr.blocks)
                    pr.caps.push_back(1 + static_cast<int>(local.next_below(b.size())));
                term.rank = std::move(pr);
                break;
            }
            default: {
                CoverageRank cr;
                const int elements = 1 + static_cast<int>(local.next_below(2 * k));
                for (int e = 0; e < elements; ++e)
                    cr.element_weights.push_back(0.2 + 0.8 * local.next_double());
                cr.covers.assign(k, {});
                for (int j = 0; j < k; ++j)
                    for (int e = 0; e < elements; ++e)
                        if (local.bernoulli(0.4)) cr.covers[j].push_back(e);
                term.rank = std::move(cr);
                break;
            }
        }
        val.terms.push_back(std::move(term));
    }
    return val;
}

Instance random_instance(const RandomInstanceOptions& opts, const Rng& rng) {
    if (opts.n < 1 || opts.k < 1) throw parameter_error("instance needs users and channels");
    Rng graph_rng = rng.fork(10);
    ConflictGraph g(opts.n, !opts.weighted);
    for (int u = 0; u < opts.n; ++u)
        for (int v = 0; v < opts.n; ++v) {
            if (u == v) continue;
            if (opts.weighted) {
                if (graph_rng.bernoulli(opts.edge_probability))
                    g.set_weight(u, v, opts.weight_scale * graph_rng.next_double());
            } else if (u < v && graph_rng.bernoulli(opts.edge_probability)) {
                g.add_edge(u, v);
            }
        }

    Instance inst;
    inst.graph.graph = g;
    inst.graph.ordering.position.resize(opts.n);
    for (int v = 0; v < opts.n; ++v) inst.graph.ordering.position[v] = v;
    inst.graph.ordering.rho = rho_of_ordering(g, inst.graph.ordering.position);
    inst.k = opts.k;
    for (int v = 0; v < opts.n; ++v) {
        const Rng vr = rng.fork(20, v);
        if (opts.mrs)
            inst.valuations.emplace_back(random_mrs_valuation(opts.k, vr));
        else
            inst.valuations.emplace_back(random_symmetric_valuation(opts.k, vr));
    }
    validate_instance(inst);
    return inst;
}

}  // namespace specauction
