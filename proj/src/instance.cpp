#include "specauction/instance.hpp"

#include <bit>

#include "specauction/errors.hpp"

namespace specauction {

void validate_instance(const Instance& inst) {
    if (inst.k < 1 || inst.k > 31) throw parameter_error("channel count must be in [1, 31]");
    const int n = inst.n();
    if (static_cast<int>(inst.graph.ordering.position.size()) != n)
        throw domain_error("ordering does not match graph");
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int pos : inst.graph.ordering.position) {
        if (pos < 0 || pos >= n || seen[static_cast<size_t>(pos)])
            throw domain_error("ordering positions must form a permutation");
        seen[static_cast<size_t>(pos)] = true;
    }
    if (static_cast<int>(inst.valuations.size()) != n)
        throw domain_error("one valuation required per user");
    for (const Valuation& val : inst.valuations) validate_valuation(val, inst.k);
    if (!(inst.graph.ordering.rho >= 0.0)) throw domain_error("rho must be >= 0");
}

Allocation empty_allocation(int n) { return Allocation{std::vector<ChannelSet>(n, 0u)}; }

bool allocation_feasible(const ConflictGraph& g, int k, const Allocation& alloc) {
    if (static_cast<int>(alloc.sets.size()) != g.n()) return false;
    for (ChannelSet s : alloc.sets)
        if (k < 32 && (s >> k) != 0) return false;
    for (int j = 0; j < k; ++j) {
        VertexSet users;
        for (int v = 0; v < g.n(); ++v)
            if ((alloc.sets[v] >> j) & 1u) users.push_back(v);
        if (!is_independent(g, users)) return false;
    }
    return true;
}

double allocation_welfare(const Instance& inst, const Allocation& alloc) {
    double sum = 0.0;
    for (int v = 0; v < inst.n(); ++v) sum += value(inst.valuations[v], inst.k, alloc.sets[v]);
    return sum;
}

bool all_symmetric(const Instance& inst) {
    for (const Valuation& val : inst.valuations)
        if (!is_symmetric(val)) return false;
    return true;
}

void to_json(nlohmann::json& j, const Instance& inst) {
    nlohmann::json graph_json;
    to_json(graph_json, inst.graph);
    nlohmann::json vals = nlohmann::json::array();
    for (const Valuation& val : inst.valuations) {
        nlohmann::json vj;
        to_json(vj, val);
        vals.push_back(std::move(vj));
    }
    j = {{"n", inst.n()},
         {"k", inst.k},
         {"graph", std::move(graph_json)},
         {"valuations", std::move(vals)},
         {"meta", inst.meta}};
}

void from_json(const nlohmann::json& j, Instance& inst) {
    Instance out;
    from_json(j.at("graph"), out.graph);
    out.k = j.at("k").get<int>();
    for (const auto& vj : j.at("valuations")) {
        Valuation val;
        from_json(vj, val);
        out.valuations.push_back(std::move(val));
    }
    out.meta = j.value("meta", nlohmann::json::object());
    if (j.contains("n") && j.at("n").get<int>() != out.n())
        throw domain_error("instance n does not match graph");
    validate_instance(out);
    inst = std::move(out);
}

void to_json(nlohmann::json& j, const Allocation& alloc) {
    nlohmann::json sets = nlohmann::json::array();
    for (ChannelSet s : alloc.sets) {
        std::vector<int> channels;
        for (int j2 = 0; j2 < 32; ++j2)
            if ((s >> j2) & 1u) channels.push_back(j2);
        sets.push_back(std::move(channels));
    }
    j = {{"sets", std::move(sets)}};
}

void from_json(const nlohmann::json& j, Allocation& alloc) {
    Allocation out;
    for (const auto& channels : j.at("sets")) {
        ChannelSet s = 0;
        for (int ch : channels.get<std::vector<int>>()) {
            if (ch < 0 || ch > 31) throw domain_error("channel index out of range");
            s |= 1u << ch;
        }
        out.sets.push_back(s);
    }
    alloc = std::move(out);
}

}  // namespace specauction
