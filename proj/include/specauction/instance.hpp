#pragma once

#include <vector>

#include "json.hpp"
#include "specauction/graph.hpp"
#include "specauction/valuation.hpp"

namespace specauction {

// One auction problem: conflict graph with ordering, k channels, one
// valuation per user. meta echoes generator provenance (model, seed, params).
struct Instance {
    OrderedGraph graph;
    int k = 0;
    std::vector<Valuation> valuations;
    nlohmann::json meta = nlohmann::json::object();

    int n() const { return graph.graph.n(); }
};

void validate_instance(const Instance& inst);

// Per-user channel sets. sets[v] is a bitmask over [0, k).
struct Allocation {
    std::vector<ChannelSet> sets;

    int count(int v) const { return std::popcount(sets[v]); }
    bool empty() const {
        for (ChannelSet s : sets)
            if (s) return false;
        return true;
    }
};

Allocation empty_allocation(int n);

// Users sharing a channel must form an independent set, for every channel.
bool allocation_feasible(const ConflictGraph& g, int k, const Allocation& alloc);

double allocation_welfare(const Instance& inst, const Allocation& alloc);

// True when every valuation is symmetric (the class the count-form LP and the
// symmetric rounding algorithms require).
bool all_symmetric(const Instance& inst);

void to_json(nlohmann::json& j, const Instance& inst);
void from_json(const nlohmann::json& j, Instance& inst);

void to_json(nlohmann::json& j, const Allocation& alloc);
void from_json(const nlohmann::json& j, Allocation& alloc);

}  // namespace specauction
