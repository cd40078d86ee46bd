#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <vector>

#include "specauction/decomposition.hpp"
#include "specauction/errors.hpp"
#include "specauction/generate.hpp"
#include "specauction/graph.hpp"
#include "specauction/greedy.hpp"
#include "specauction/instance.hpp"
#include "specauction/lp.hpp"
#include "specauction/mechanism.hpp"
#include "specauction/midr.hpp"
#include "specauction/rng.hpp"
#include "specauction/rounding.hpp"
#include "specauction/trials.hpp"
#include "specauction/valuation.hpp"

using namespace specauction;

namespace {

Valuation sym(std::vector<double> values) { return SymmetricValuation{std::move(values)}; }

Ordering identity_ordering(int n, double rho) {
    Ordering o;
    o.position.resize(n);
    for (int v = 0; v < n; ++v) o.position[v] = v;
    o.rho = rho;
    return o;
}

// Path 0 - 1 - 2, identity ordering.
OrderedGraph path3() {
    OrderedGraph og;
    og.graph = ConflictGraph::make_unweighted(3, {{0, 1}, {1, 2}});
    og.ordering = identity_ordering(3, rho_of_ordering(og.graph, {0, 1, 2}));
    return og;
}

// Worked seven-user example: k = 1, identity ordering, one floating bid.
Instance figure_instance(double x) {
    OrderedGraph og;
    og.graph = ConflictGraph::make_unweighted(7, {{6, 5},
                                                  {6, 0},
                                                  {5, 4},
                                                  {5, 3},
                                                  {4, 3},
                                                  {4, 2},
                                                  {4, 1},
                                                  {3, 0},
                                                  {2, 0},
                                                  {1, 0}});
    og.ordering = identity_ordering(7, rho_of_ordering(og.graph, {0, 1, 2, 3, 4, 5, 6}));
    Instance inst;
    inst.graph = og;
    inst.k = 1;
    const std::vector<double> bids = {11.5, 7.0, 7.0, 7.0, 6.0, 6.0, x};
    for (double b : bids) inst.valuations.push_back(sym({0.0, b}));
    validate_instance(inst);
    return inst;
}

Instance two_user_edge_k2() {
    Instance inst;
    inst.graph.graph = ConflictGraph::make_unweighted(2, {{0, 1}});
    inst.graph.ordering = identity_ordering(2, 2.0);
    inst.k = 2;
    inst.valuations = {sym({0.0, 1.0, 2.0}), sym({0.0, 1.0, 2.0})};
    validate_instance(inst);
    return inst;
}

}  // namespace

TEST_SUITE("rng") {
    TEST_CASE("streams are deterministic") {
        Rng a(42), b(42);
        for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("forks are independent of sibling consumption") {
        const Rng a(7);
        const uint64_t before = a.fork(3).next_u64();
        Rng sibling = a.fork(4);
        sibling.next_u64();
        sibling.next_u64();
        // Draining one child stream never moves another.
        CHECK(a.fork(3).next_u64() == before);
    }

    TEST_CASE("distinct tags give distinct streams") {
        Rng a(7);
        CHECK(a.fork(1).next_u64() != a.fork(2).next_u64());
        CHECK(a.fork(1).next_u64() != a.next_u64());
    }

    TEST_CASE("two-tag fork composes single-tag forks") {
        Rng a(9);
        CHECK(a.fork(4, 5).next_u64() == a.fork(4).fork(5).next_u64());
    }

    TEST_CASE("next_below stays in range and covers it") {
        Rng a(11);
        std::vector<int> seen(5, 0);
        for (int i = 0; i < 200; ++i) {
            const uint64_t r = a.next_below(5);
            REQUIRE(r < 5);
            seen[static_cast<size_t>(r)]++;
        }
        for (int c : seen) CHECK(c > 0);
    }

    TEST_CASE("next_double lies in the unit interval") {
        Rng a(13);
        for (int i = 0; i < 100; ++i) {
            const double u = a.next_double();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
    }
}

TEST_SUITE("graph") {
    TEST_CASE("symmetric weight adds both directions") {
        ConflictGraph g(2);
        g.set_weight(0, 1, 0.5);
        g.set_weight(1, 0, 0.3);
        CHECK(symmetric_weight(g, 0, 1) == 0.8);
        CHECK(symmetric_weight(g, 1, 0) == 0.8);
        CHECK_THROWS_AS(symmetric_weight(g, 1, 1), domain_error);
    }

    TEST_CASE("independence is strict at incoming weight 1") {
        ConflictGraph g(3);
        g.set_weight(0, 2, 0.5);
        g.set_weight(1, 2, 0.5);
        CHECK_FALSE(is_independent(g, {0, 1, 2}));
        CHECK_FALSE(is_independent_mask(g, 0b111));
        g.set_weight(1, 2, 0.49);
        CHECK(is_independent(g, {0, 1, 2}));
        CHECK(is_independent_mask(g, 0b111));
        CHECK(is_independent(g, {0, 1}));
        CHECK(is_independent(g, {}));
    }

    TEST_CASE("path rho depends on the ordering") {
        const OrderedGraph og = path3();
        CHECK(rho_of_ordering(og.graph, {0, 1, 2}) == 2.0);
        // Middle vertex last sees both endpoints as one independent set.
        CHECK(rho_of_ordering(og.graph, {0, 2, 1}) == 4.0);
        CHECK(exact_rho(og.graph).rho == 2.0);
    }

    TEST_CASE("rho bound mode drops the independence condition") {
        const OrderedGraph og = path3();
        CHECK(rho_of_ordering(og.graph, {0, 2, 1}, RhoMode::bound) == 4.0);
        // Exact mode on a triangle: earlier pair is dependent, so only one
        // neighbor can count. Bound mode adds both.
        ConflictGraph tri = ConflictGraph::make_unweighted(3, {{0, 1}, {0, 2}, {1, 2}});
        CHECK(rho_of_ordering(tri, {0, 1, 2}, RhoMode::exact) == 2.0);
        CHECK(rho_of_ordering(tri, {0, 1, 2}, RhoMode::bound) == 4.0);
    }

    TEST_CASE("weighted single edge has exact rho 0.8") {
        ConflictGraph g(2);
        g.set_weight(0, 1, 0.5);
        g.set_weight(1, 0, 0.3);
        const RhoResult r = exact_rho(g);
        CHECK(r.rho == 0.8);
        CHECK(rho_of_ordering(g, r.ordering.position) == 0.8);
    }

    TEST_CASE("exact rho is guarded") {
        ConflictGraph g(10, true);
        CHECK_THROWS_AS(exact_rho(g), size_error);
    }

    TEST_CASE("earlier neighbors respect the threshold") {
        ConflictGraph g(3);
        g.set_weight(0, 2, 0.6);
        g.set_weight(2, 0, 0.5);  // wbar(0,2) = 1.1 >= 1
        g.set_weight(1, 2, 0.3);  // wbar(1,2) = 0.3 < 1
        const Ordering o = identity_ordering(3, 1.1);
        CHECK(earlier_neighbors(g, o, 2) == VertexSet({0}));
        CHECK(earlier_neighbors(g, o, 0).empty());
    }

    TEST_CASE("protocol model thresholds distances and orders by degree") {
        const std::vector<Point> pts = {{0.0, 0.0}, {1.0, 0.0}, {5.0, 0.0}};
        const OrderedGraph og = gen_protocol_model(pts, 1.5);
        CHECK(og.graph.unweighted());
        CHECK(og.graph.weight(0, 1) == 1.0);
        CHECK(og.graph.weight(1, 0) == 1.0);
        CHECK(og.graph.weight(1, 2) == 0.0);
        CHECK(og.graph.weight(0, 2) == 0.0);
        // Isolated vertex 2 has degree 0 and comes first; ties by index.
        CHECK(og.ordering.position == std::vector<int>({1, 2, 0}));
        CHECK(og.ordering.rho == 2.0);
    }

    TEST_CASE("physical model reproduces the affectance formula") {
        // Two parallel unit links, senders 2 away from the other receiver.
        const std::vector<Link> links = {{{0.0, 0.0}, {1.0, 0.0}}, {{3.0, 0.0}, {2.0, 0.0}}};
        PhysicalParams params;
        params.pathloss = 3.0;
        params.sinr_threshold = 2.0;
        params.noise = 0.1;
        const OrderedGraph og = gen_physical_model(links, params);
        // d^-3 = 1/8 against denominator 1/2 - 0.1 = 0.4.
        CHECK(og.graph.weight(0, 1) == doctest::Approx(0.3125).epsilon(1e-12));
        CHECK(og.graph.weight(1, 0) == doctest::Approx(0.3125).epsilon(1e-12));
        CHECK(og.ordering.position == std::vector<int>({0, 1}));
    }

    TEST_CASE("infeasible lone link is rejected") {
        // Denominator 1/2 - 0.6 < 0: the link cannot meet its own threshold.
        const std::vector<Link> links = {{{0.0, 0.0}, {1.0, 0.0}}};
        PhysicalParams params;
        params.noise = 0.6;
        CHECK_THROWS_AS(gen_physical_model(links, params), domain_error);
    }

    TEST_CASE("ordered graph json round trip") {
        ConflictGraph g(2);
        g.set_weight(0, 1, 0.25);
        OrderedGraph og{g, identity_ordering(2, 0.25)};
        nlohmann::json j = og;
        OrderedGraph back = j.get<OrderedGraph>();
        CHECK(back.graph.weight(0, 1) == 0.25);
        CHECK(back.graph.weight(1, 0) == 0.0);
        CHECK(back.ordering.position == og.ordering.position);
        CHECK(back.ordering.rho == og.ordering.rho);
    }
}

TEST_SUITE("valuation") {
    TEST_CASE("symmetric value reads the count curve") {
        const Valuation v = sym({0.0, 1.0, 1.5});
        CHECK(value(v, 2, 0b00) == 0.0);
        CHECK(value(v, 2, 0b01) == 1.0);
        CHECK(value(v, 2, 0b11) == 1.5);
        CHECK(value_count(v, 1) == 1.0);
        CHECK(is_symmetric(v));
    }

    TEST_CASE("matroid rank terms evaluate and cap") {
        MrsValuation mrs;
        mrs.terms.push_back({2.0, UniformRank{1}});
        PartitionRank part;
        part.blocks = {{0, 1}, {2}};
        part.caps = {1, 1};
        mrs.terms.push_back({1.0, part});
        const Valuation v = mrs;
        validate_valuation(v, 3);
        CHECK_FALSE(is_symmetric(v));
        CHECK(value(v, 3, 0b000) == 0.0);
        CHECK(value(v, 3, 0b001) == 3.0);           // uniform 1 + block hit 1
        CHECK(value(v, 3, 0b011) == 3.0);           // caps bind
        CHECK(value(v, 3, 0b111) == 4.0);           // second block adds 1
        CHECK_THROWS_AS(value_count(v, 1), mode_error);
    }

    TEST_CASE("coverage rank takes weighted unions") {
        CoverageRank cov;
        cov.element_weights = {2.0, 3.0};
        cov.covers = {{0}, {0, 1}};
        MrsValuation mrs;
        mrs.terms.push_back({1.0, cov});
        const Valuation v = mrs;
        validate_valuation(v, 2);
        CHECK(value(v, 2, 0b01) == 2.0);
        CHECK(value(v, 2, 0b10) == 5.0);
        CHECK(value(v, 2, 0b11) == 5.0);
    }

    TEST_CASE("validation rejects malformed curves") {
        CHECK_THROWS_AS(validate_valuation(sym({1.0, 2.0}), 1), domain_error);   // values[0] != 0
        CHECK_THROWS_AS(validate_valuation(sym({0.0, 2.0, 1.0}), 2), domain_error);  // decreasing
        CHECK_THROWS_AS(validate_valuation(sym({0.0, 1.0}), 2), domain_error);   // length mismatch
    }

    TEST_CASE("lottery value matches hand-computed expectations") {
        MrsValuation mrs;
        mrs.terms.push_back({1.0, UniformRank{1}});
        // E[min(|T|,1)] with q = (1/2, 1/2) is 1 - 1/4.
        CHECK(lottery_value(mrs, {0.5, 0.5}) == doctest::Approx(0.75).epsilon(1e-14));

        const Valuation s = sym({0.0, 1.0, 1.5});
        // P[one hit] * 1 + P[two hits] * 1.5 = 0.5 + 0.375.
        CHECK(lottery_value(s, {0.5, 0.5}) == doctest::Approx(0.875).epsilon(1e-14));

        CoverageRank cov;
        cov.element_weights = {2.0, 3.0};
        cov.covers = {{0}, {0, 1}};
        MrsValuation cv;
        cv.terms.push_back({1.0, cov});
        // 2 (1 - 1/4) + 3 (1 - 1/2).
        CHECK(lottery_value(cv, {0.5, 0.5}) == doctest::Approx(3.0).epsilon(1e-14));
    }

    TEST_CASE("lottery endpoints agree with set values") {
        MrsValuation mrs;
        mrs.terms.push_back({1.5, UniformRank{2}});
        PartitionRank part;
        part.blocks = {{0, 2}, {1}};
        part.caps = {2, 1};
        mrs.terms.push_back({0.5, part});
        const Valuation v = mrs;
        CHECK(lottery_value(v, {1.0, 1.0, 1.0}) == doctest::Approx(value(v, 3, 0b111)));
        CHECK(lottery_value(v, {0.0, 0.0, 0.0}) == 0.0);
        CHECK(lottery_value(v, {1.0, 0.0, 0.0}) == doctest::Approx(value(v, 3, 0b001)));
    }

    TEST_CASE("gradient matches central differences") {
        MrsValuation mrs;
        mrs.terms.push_back({1.0, UniformRank{2}});
        CoverageRank cov;
        cov.element_weights = {1.0, 0.7, 0.4};
        cov.covers = {{0, 1}, {1, 2}, {0, 2}};
        mrs.terms.push_back({0.8, cov});
        const Valuation v = mrs;
        const std::vector<double> q = {0.3, 0.6, 0.2};
        const std::vector<double> grad = lottery_gradient(v, q);
        const double h = 1e-6;
        for (int j = 0; j < 3; ++j) {
            std::vector<double> lo = q, hi = q;
            lo[j] -= h;
            hi[j] += h;
            const double fd = (lottery_value(v, hi) - lottery_value(v, lo)) / (2 * h);
            CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    TEST_CASE("hessian has zero diagonal and nonpositive cross terms") {
        MrsValuation mrs;
        mrs.terms.push_back({1.0, UniformRank{1}});
        const std::vector<double> h2 = lottery_hessian(mrs, {0.3, 0.7});
        CHECK(h2[0] == 0.0);
        CHECK(h2[3] == 0.0);
        CHECK(h2[1] == doctest::Approx(-1.0));
        CHECK(h2[1] == h2[2]);

        const Valuation s = sym({0.0, 1.0, 1.5});
        const std::vector<double> hs = lottery_hessian(s, {0.5, 0.5});
        CHECK(hs[1] == doctest::Approx(-0.5));
    }

    TEST_CASE("lottery enumeration guard") {
        std::vector<double> q(21, 0.5);
        CHECK_THROWS_AS(lottery_value(sym(std::vector<double>(22, 0.0)), q), size_error);
    }

    TEST_CASE("valuation json round trip") {
        MrsValuation mrs;
        mrs.terms.push_back({2.0, UniformRank{1}});
        PartitionRank part;
        part.blocks = {{0}, {1}};
        part.caps = {1, 1};
        mrs.terms.push_back({1.0, part});
        const Valuation v = mrs;
        nlohmann::json j = v;
        const Valuation back = j.get<Valuation>();
        for (ChannelSet t = 0; t < 4; ++t) CHECK(value(back, 2, t) == value(v, 2, t));

        const Valuation s = sym({0.0, 0.5});
        nlohmann::json js = s;
        CHECK(value(js.get<Valuation>(), 1, 1) == 0.5);
    }
}

TEST_SUITE("instance") {
    TEST_CASE("validation catches structural mistakes") {
        Instance inst = two_user_edge_k2();
        CHECK_NOTHROW(validate_instance(inst));

        Instance bad = inst;
        bad.k = 0;
        CHECK_THROWS_AS(validate_instance(bad), parameter_error);

        bad = inst;
        bad.graph.ordering.position = {0, 0};
        CHECK_THROWS_AS(validate_instance(bad), domain_error);

        bad = inst;
        bad.valuations.pop_back();
        CHECK_THROWS_AS(validate_instance(bad), domain_error);

        ConflictGraph g(2);
        CHECK_THROWS_AS(g.set_weight(0, 1, -0.5), domain_error);
        CHECK_THROWS_AS(g.set_weight(0, 0, 0.5), domain_error);
    }

    TEST_CASE("feasibility is per channel and strict") {
        ConflictGraph g(2);
        g.set_weight(0, 1, 1.0);
        Allocation a = empty_allocation(2);
        a.sets = {0b01, 0b01};
        CHECK_FALSE(allocation_feasible(g, 2, a));
        a.sets = {0b01, 0b10};
        CHECK(allocation_feasible(g, 2, a));
        g.set_weight(0, 1, 0.99);
        a.sets = {0b01, 0b01};
        CHECK(allocation_feasible(g, 2, a));
    }

    TEST_CASE("welfare sums per-user set values") {
        const Instance inst = two_user_edge_k2();
        Allocation a = empty_allocation(2);
        a.sets = {0b11, 0b00};
        CHECK(allocation_welfare(inst, a) == 2.0);
        a.sets = {0b01, 0b10};
        CHECK(allocation_welfare(inst, a) == 2.0);
        CHECK(a.count(0) == 1);
        CHECK_FALSE(a.empty());
        CHECK(empty_allocation(2).empty());
    }

    TEST_CASE("instance json round trip") {
        Instance inst = two_user_edge_k2();
        inst.meta["note"] = "fixture";
        nlohmann::json j = inst;
        const Instance back = j.get<Instance>();
        CHECK(back.k == 2);
        CHECK(back.n() == 2);
        CHECK(back.graph.graph.weight(0, 1) == 1.0);
        CHECK(back.graph.ordering.rho == 2.0);
        CHECK(all_symmetric(back));
        CHECK(value(back.valuations[1], 2, 0b11) == 2.0);
        CHECK(back.meta["note"] == "fixture");
    }
}

TEST_SUITE("lp") {
    TEST_CASE("two-user count relaxation optimum is 4") {
        const Instance inst = two_user_edge_k2();
        const CountLpSolution sol = solve_count_lp(inst);
        CHECK(sol.objective_value == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(sol.gap <= 1e-9 * 4.0 + 1e-15);
    }

    TEST_CASE("single-channel relaxation with claimed rho 1 gives 1.5") {
        ConflictGraph g = ConflictGraph::make_unweighted(2, {{0, 1}});
        const Ordering o = identity_ordering(2, 1.0);  // claimed bound, not the graph's
        const ChannelLpSolution sol = solve_channel_lp(g, o, {1.0, 1.0});
        CHECK(sol.objective_value == doctest::Approx(1.5).epsilon(1e-9));
        CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("certificates cover every variable") {
        // Random packing LP; the dual must dominate the reduced costs.
        Rng rng(99);
        PackingLp lp;
        lp.num_vars = 6;
        lp.objective.resize(6);
        lp.upper.assign(6, 1.0);
        for (double& c : lp.objective) c = rng.next_double() * 3.0;
        for (int r = 0; r < 4; ++r) {
            PackingLp::Row row;
            for (int j = 0; j < 6; ++j)
                if (rng.bernoulli(0.6)) row.terms.push_back({j, 0.2 + rng.next_double()});
            row.rhs = 0.5 + rng.next_double();
            lp.rows.push_back(row);
        }
        const LpSolution sol = solve_packing_lp(lp);
        CHECK(sol.gap >= 0.0);
        CHECK(sol.gap <= 1e-9 * std::max(1.0, std::abs(sol.objective_value)));
        CHECK(check_lp_feasible(lp, sol.x, 1e-9).ok);

        std::vector<double> cover(6, 0.0);
        for (size_t r = 0; r < lp.rows.size(); ++r)
            for (const auto& [j, a] : lp.rows[r].terms) cover[j] += sol.dual_rows[r] * a;
        for (int j = 0; j < 6; ++j) cover[j] += sol.dual_upper[j];
        for (int j = 0; j < 6; ++j) CHECK(cover[j] >= lp.objective[j] - 1e-9);
    }

    TEST_CASE("feasibility checker flags violations") {
        PackingLp lp;
        lp.num_vars = 1;
        lp.objective = {1.0};
        lp.upper = {1.0};
        PackingLp::Row row;
        row.terms = {{0, 2.0}};
        row.rhs = 1.0;
        lp.rows.push_back(row);
        CHECK(check_lp_feasible(lp, {0.5}, 1e-9).ok);
        CHECK_FALSE(check_lp_feasible(lp, {0.6}, 1e-9).ok);
        CHECK_FALSE(check_lp_feasible(lp, {-0.1}, 1e-9).ok);
    }

    TEST_CASE("count rows follow the documented layout") {
        const Instance inst = two_user_edge_k2();
        const PackingLp lp = build_symmetric_lp(inst);
        CHECK(lp.num_vars == 4);
        CHECK(count_var(1, 2, 2) == 3);
        // User 1's interference row: sum_i i * 2 * x_{0,i} <= rho k = 4.
        bool found = false;
        for (const auto& row : lp.rows) {
            if (row.terms.size() == 2 && row.rhs == 4.0 && row.terms[0].first == 0 &&
                row.terms[0].second == 2.0 && row.terms[1].first == 1 &&
                row.terms[1].second == 4.0)
                found = true;
        }
        CHECK(found);
    }

    TEST_CASE("lp text dump is well formed") {
        const Instance inst = two_user_edge_k2();
        std::ostringstream os;
        write_lp_text(os, build_symmetric_lp(inst), "count");
        const std::string text = os.str();
        CHECK(text.find("Maximize") != std::string::npos);
        CHECK(text.find("Subject To") != std::string::npos);
        CHECK(text.find("Bounds") != std::string::npos);
        CHECK(text.find("End") != std::string::npos);
    }

    TEST_CASE("user scale zeroes a user's objective") {
        const Instance inst = two_user_edge_k2();
        std::vector<double> scale = {1.0, 0.0};
        const CountLpSolution sol = solve_count_lp(inst, 1e-9, &scale);
        CHECK(sol.objective_value == doctest::Approx(2.0).epsilon(1e-9));
    }
}

TEST_SUITE("greedy") {
    TEST_CASE("local ratio on the worked example") {
        const Instance low = figure_instance(3.0);
        std::vector<double> bids;
        for (const auto& v : low.valuations) bids.push_back(value_count(v, 1));
        const LocalRatioResult lr = local_ratio_greedy(low.graph.graph, low.graph.ordering, bids);
        CHECK(lr.chosen == VertexSet({1, 2, 3, 6}));
        CHECK(lr.residuals == std::vector<double>({-0.5, 4.0, 4.0, 1.0, 3.0, 3.0, 3.0}));

        const Instance high = figure_instance(4.0);
        bids[6] = 4.0;
        const LocalRatioResult hr = local_ratio_greedy(high.graph.graph, high.graph.ordering, bids);
        CHECK(hr.chosen == VertexSet({0, 4}));
        CHECK(hr.residuals == std::vector<double>({0.5, 3.0, 3.0, 1.0, 4.0, 2.0, 4.0}));
    }

    TEST_CASE("local ratio on the path") {
        const OrderedGraph og = path3();
        const LocalRatioResult lr = local_ratio_greedy(og.graph, og.ordering, {3.0, 5.0, 4.0});
        CHECK(lr.chosen == VertexSet({0, 2}));
        CHECK(lr.residuals == std::vector<double>({2.0, 1.0, 4.0}));
    }

    TEST_CASE("monotone greedy keeps the best prefix") {
        const OrderedGraph og = path3();
        CHECK(monotone_greedy(og.graph, og.ordering, {3.0, 5.0, 4.0}) == VertexSet({0, 2}));
        // Bumping the middle bid past the prefix value flips the winner set.
        CHECK(monotone_greedy(og.graph, og.ordering, {3.0, 8.0, 4.0}) == VertexSet({1}));
    }

    TEST_CASE("nonpositive bids never win") {
        const OrderedGraph og = path3();
        CHECK(monotone_greedy(og.graph, og.ordering, {0.0, -1.0, 0.0}).empty());
        CHECK(local_ratio_greedy(og.graph, og.ordering, {0.0, -1.0, 0.0}).chosen.empty());
    }

    TEST_CASE("greedy output is independent") {
        Rng rng(3);
        for (int i = 0; i < 20; ++i) {
            RandomInstanceOptions opts;
            opts.n = 8;
            opts.k = 1;
            Instance inst = random_instance(opts, rng.fork(i));
            std::vector<double> bids;
            for (const auto& v : inst.valuations) bids.push_back(value_count(v, 1));
            const auto& g = inst.graph.graph;
            CHECK(is_independent(g, local_ratio_greedy(g, inst.graph.ordering, bids).chosen));
            CHECK(is_independent(g, monotone_greedy(g, inst.graph.ordering, bids)));
        }
    }

    TEST_CASE("weighted graphs are rejected") {
        ConflictGraph g(2);
        g.set_weight(0, 1, 0.5);
        const Ordering o = identity_ordering(2, 0.5);
        CHECK_THROWS_AS(local_ratio_greedy(g, o, {1.0, 1.0}), mode_error);
        CHECK_THROWS_AS(monotone_greedy(g, o, {1.0, 1.0}), mode_error);
    }
}

TEST_SUITE("rounding") {
    TEST_CASE("split preserves positions") {
        // n = 1, k = 4: entries for i = 1..4.
        const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
        const auto [small, large] = split_counts(x, 1, 4, 2);
        CHECK(small == std::vector<double>({0.1, 0.2, 0.0, 0.0}));
        CHECK(large == std::vector<double>({0.0, 0.0, 0.3, 0.4}));
    }

    TEST_CASE("sampled demand marginals follow x over denom rho_eff") {
        const int k = 8;
        std::vector<double> x(static_cast<size_t>(k), 0.0);
        x[count_var(0, 1, k)] = 0.2;
        x[count_var(0, 2, k)] = 0.1;
        const double rho_eff = 2.0, denom = 4.0;
        const int trials = 40000;
        const auto counts = count_trials_serial(trials, 3, Rng(5), [&](int, Rng r,
                                                                       std::vector<int64_t>& c) {
            const std::vector<int> d = sample_demands(x, 1, k, rho_eff, denom, r);
            c[std::min(d[0], 2)]++;
        });
        const double p1 = 0.2 / 8.0, p2 = 0.1 / 8.0;
        const double se1 = std::sqrt(p1 * (1 - p1) / trials);
        const double se2 = std::sqrt(p2 * (1 - p2) / trials);
        CHECK(std::abs(counts[1] / double(trials) - p1) <= 5 * se1);
        CHECK(std::abs(counts[2] / double(trials) - p2) <= 5 * se2);
    }

    TEST_CASE("zeroing is sequential in ordering") {
        // B is crushed by A; C survives only because B's demand is gone by
        // the time the scan reaches it.
        ConflictGraph g(3);
        g.set_weight(0, 1, 0.15);
        g.set_weight(1, 0, 0.15);
        g.set_weight(0, 2, 0.05);
        g.set_weight(2, 0, 0.05);
        g.set_weight(1, 2, 0.10);
        g.set_weight(2, 1, 0.10);
        const Ordering o = identity_ordering(3, 0.4);
        std::vector<int> d = {1, 1, 1};
        apply_zeroing(g, o, d, 8);
        CHECK(d == std::vector<int>({1, 0, 1}));
    }

    TEST_CASE("allocators validate their demand classes") {
        ConflictGraph g(2);
        g.set_weight(0, 1, 0.15);
        g.set_weight(1, 0, 0.15);
        const Ordering o = identity_ordering(2, 0.3);
        const std::vector<double> rv = {1.0, 1.0};
        // Small side: demands above floor(k/8) are out of class.
        CHECK_THROWS_AS(allocate_small(g, o, {2, 0}, 8, rv, Rng(1)), domain_error);
        // Small side: the zeroing predicate must already hold.
        ConflictGraph heavy(2);
        heavy.set_weight(0, 1, 0.2);
        heavy.set_weight(1, 0, 0.2);
        CHECK_THROWS_AS(allocate_small(heavy, o, {1, 1}, 8, rv, Rng(1)), domain_error);
        // Large side: 8 d >= k or zero.
        CHECK_THROWS_AS(allocate_large(g, o, {1, 0}, 16, rv), domain_error);
        CHECK_NOTHROW(allocate_large(g, o, {2, 0}, 16, rv));
    }

    TEST_CASE("incoming diagnostics record shared-channel pressure") {
        // Weights small enough to pass admission, so both users share the
        // only channel and the recorded incoming is exactly the edge weight.
        ConflictGraph g(2);
        g.set_weight(0, 1, 0.02);
        g.set_weight(1, 0, 0.01);
        const Ordering o = identity_ordering(2, 0.03);
        RoundDiagnostics diag;
        const Allocation a = allocate_large(g, o, {1, 1}, 1, {1.0, 1.0}, &diag);
        CHECK(a.sets[0] == 1u);
        CHECK(a.sets[1] == 1u);
        CHECK(diag.max_channel_incoming == doctest::Approx(0.02).epsilon(1e-12));
        CHECK(diag.max_channel_incoming_sym == doctest::Approx(0.03).epsilon(1e-12));
        CHECK(diag.rounds == 1);
    }

    TEST_CASE("large-demand rounds respect the symmetric pressure bound") {
        Rng rng(17);
        double worst = 0.0;
        for (int i = 0; i < 60; ++i) {
            RandomInstanceOptions opts;
            opts.n = 3 + static_cast<int>(rng.fork(i).next_below(8));
            opts.k = 8;
            opts.weighted = true;
            const Instance inst = random_instance(opts, rng.fork(1000 + i));
            const CountLpSolution frac = solve_count_lp(inst);
            for (int s = 0; s < 5; ++s) {
                RoundDiagnostics dl;
                const Allocation a = round_weighted(inst, frac, rng.fork(i * 10 + s), nullptr, &dl);
                CHECK(allocation_feasible(inst.graph.graph, inst.k, a));
                worst = std::max(worst, dl.max_channel_incoming_sym);
                CHECK(dl.max_channel_incoming_sym < 0.5);
            }
        }
        CHECK(worst >= 0.0);
    }

    TEST_CASE("small-demand resolution stays within budget on wide spectra") {
        Rng rng(23);
        for (int i = 0; i < 20; ++i) {
            RandomInstanceOptions opts;
            opts.n = 3 + static_cast<int>(rng.fork(i).next_below(6));
            opts.k = 16 + 8 * static_cast<int>(rng.fork(500 + i).next_below(2));
            opts.weighted = true;
            const Instance inst = random_instance(opts, rng.fork(2000 + i));
            const CountLpSolution frac = solve_count_lp(inst);
            RoundDiagnostics ds;
            const Allocation a = round_weighted(inst, frac, rng.fork(3000 + i), &ds, nullptr);
            CHECK(allocation_feasible(inst.graph.graph, inst.k, a));
            if (ds.rounds > 0) CHECK(ds.min_claim_ratio > 0.5);
        }
    }

    TEST_CASE("unweighted rounding is feasible and deterministic") {
        Rng rng(29);
        RandomInstanceOptions opts;
        opts.n = 8;
        opts.k = 4;
        const Instance inst = random_instance(opts, rng);
        const CountLpSolution frac = solve_count_lp(inst);
        const Allocation a = round_unweighted(inst, frac, Rng(77));
        const Allocation b = round_unweighted(inst, frac, Rng(77));
        CHECK(a.sets == b.sets);
        CHECK(allocation_feasible(inst.graph.graph, inst.k, a));
    }

    TEST_CASE("unweighted rounding rejects weighted graphs") {
        RandomInstanceOptions opts;
        opts.n = 5;
        opts.k = 4;
        opts.weighted = true;
        const Instance inst = random_instance(opts, Rng(31));
        const CountLpSolution frac = solve_count_lp(inst);
        CHECK_THROWS_AS(round_unweighted(inst, frac, Rng(1)), mode_error);
        CHECK_NOTHROW(round_weighted(inst, frac, Rng(1)));
    }
}

TEST_SUITE("decomposition") {
    TEST_CASE("single edge decomposes exactly at rho") {
        ConflictGraph g = ConflictGraph::make_unweighted(2, {{0, 1}});
        const Ordering o = identity_ordering(2, 2.0);
        const std::vector<double> x = {0.6, 0.4};
        const Decomposition dec = decompose_channel(g, o, x, 2.0, make_greedy_oracle(g, o));
        CHECK(dec.alpha_achieved == 2.0);
        CHECK(dec.entries.size() <= 3);
        double lam = 0.0;
        std::vector<double> marg(2, 0.0);
        for (const auto& e : dec.entries) {
            lam += e.lambda;
            for (int v = 0; v < 2; ++v)
                if (e.outcome.sets[v]) marg[v] += e.lambda;
        }
        CHECK(std::abs(lam - 1.0) <= 1e-12);
        CHECK(std::abs(marg[0] - 0.3) <= 1e-9);
        CHECK(std::abs(marg[1] - 0.2) <= 1e-9);
        CHECK(verify_channel_decomposition(g, dec, x, 2.0).ok);
        CHECK_FALSE(verify_channel_decomposition(g, dec, x, 4.0).ok);
    }

    TEST_CASE("weighted oracle closes within the committed lottery scale") {
        // Rounding plans commit to this scale up front and forbid doubling,
        // so the oracle must certify a decomposition at exactly this alpha.
        Rng rng(41);
        for (int i = 0; i < 10; ++i) {
            RandomInstanceOptions opts;
            opts.n = 4 + static_cast<int>(rng.fork(i).next_below(4));
            opts.k = 1;
            opts.weighted = true;
            const Instance inst = random_instance(opts, rng.fork(100 + i));
            const auto& g = inst.graph.graph;
            const auto& o = inst.graph.ordering;
            std::vector<double> w(static_cast<size_t>(inst.n()));
            for (int v = 0; v < inst.n(); ++v) w[v] = 0.1 + rng.fork(200 + i).fork(v).next_double();
            const ChannelLpSolution sol = solve_channel_lp(g, o, w);
            const double log_n = std::max(1.0, std::ceil(std::log2(inst.n())));
            const double alpha = 4.0 * effective_rho(o.rho) * log_n;
            DecomposeOptions dopts;
            dopts.allow_doubling = false;
            const Decomposition dec = decompose_channel(
                g, o, sol.x, alpha, make_weighted_oracle(g, o, sol.x, 7), dopts);
            CHECK(verify_channel_decomposition(g, dec, sol.x, alpha).ok);
            CHECK(dec.alpha_achieved == alpha);
        }
    }

    TEST_CASE("count-form decomposition reproduces lp marginals") {
        const Instance inst = two_user_edge_k2();
        const CountLpSolution sol = solve_count_lp(inst);
        const double alpha = lavi_swamy_alpha(inst);
        const Decomposition dec = decompose_count_solution(inst, sol.x, alpha, Rng(5));
        const DecompositionReport rep = verify_count_decomposition(inst, dec, sol.x, alpha);
        CHECK(rep.ok);
        CHECK(rep.lambda_sum_error <= 1e-9);
        CHECK(rep.max_marginal_error <= 1e-7);
        CHECK_FALSE(verify_count_decomposition(inst, dec, sol.x, 2 * alpha).ok);
    }

    TEST_CASE("doubling is reported through alpha_achieved") {
        // A deliberately weak oracle (worst singleton) forces doubling.
        ConflictGraph g = ConflictGraph::make_unweighted(2, {{0, 1}});
        const Ordering o = identity_ordering(2, 2.0);
        const std::vector<double> x = {1.0, 1.0};
        ChannelOracle weak = [](const std::vector<double>& w) {
            int best = 0;
            for (int v = 0; v < static_cast<int>(w.size()); ++v)
                if (w[v] < w[best]) best = v;
            return VertexSet{best};
        };
        const Decomposition dec = decompose_channel(g, o, x, 1.0, weak);
        CHECK(dec.alpha_achieved >= 2.0);
        CHECK(verify_channel_decomposition(g, dec, x, dec.alpha_achieved).ok);

        DecomposeOptions strict;
        strict.allow_doubling = false;
        CHECK_THROWS_AS(decompose_channel(g, o, x, 1.0, weak, strict), decomposition_error);
    }
}

TEST_SUITE("midr") {
    TEST_CASE("defaults follow the instance class") {
        CHECK(default_midr_mu(2, 2) == std::ldexp(1.0, -40));
        CHECK(default_midr_mu(10, 8) == std::ldexp(1.0, -80));
        CHECK(default_midr_mu(40, 40) == std::ldexp(1.0, -1000));

        const Instance unw = two_user_edge_k2();
        CHECK(default_midr_alpha(unw) == 2.0);

        RandomInstanceOptions opts;
        opts.n = 4;
        opts.k = 2;
        opts.weighted = true;
        const Instance w = random_instance(opts, Rng(3));
        CHECK(default_midr_alpha(w) ==
              4.0 * effective_rho(w.graph.ordering.rho) * 2.0);  // ceil(log2 4) = 2
    }

    TEST_CASE("rounding probabilities use the exponential map") {
        const std::vector<double> q = rounding_probabilities({1.0, 0.0}, 1.0);
        CHECK(q[0] == doctest::Approx(0.39346934028736658).epsilon(1e-12));
        CHECK(q[1] == 0.0);
    }

    TEST_CASE("single-user optimum hits the box face") {
        Instance inst;
        inst.graph.graph = ConflictGraph(1, true);
        inst.graph.ordering = identity_ordering(1, 0.0);
        inst.k = 1;
        inst.valuations = {sym({0.0, 5.0})};
        validate_instance(inst);
        // Edgeless graphs clamp to the box scale.
        CHECK(default_midr_alpha(inst) == 1.0);
        const ConvexSolution sol = maximize_expected_welfare(inst);
        // Objective 5 (1 - exp(-x / (2 alpha))) maximized at x = 1.
        CHECK(sol.objective == doctest::Approx(1.9673467014368329).epsilon(1e-8));
        CHECK(sol.x[0] > 1.0 - 1e-6);
        CHECK(sol.fw_gap <= 1e-9 * std::max(1.0, sol.objective));
    }

    TEST_CASE("pipeline value equals the perturbed welfare split") {
        RandomInstanceOptions opts;
        opts.n = 3;
        opts.k = 2;
        opts.mrs = true;
        const Instance inst = random_instance(opts, Rng(11));
        const double alpha = default_midr_alpha(inst);
        const double mu = default_midr_mu(3, 2);
        std::vector<double> x(6);
        Rng r(13);
        for (double& xi : x) xi = 0.3 * r.next_double();
        double total = 0.0;
        for (int v = 0; v < 3; ++v) total += pipeline_user_value(inst, x, alpha, mu, v);
        CHECK(total == doctest::Approx(perturbed_welfare(inst, x, alpha, mu)).epsilon(1e-12));

        std::vector<double> drop = {1.0, 0.0, 1.0};
        const double without = perturbed_welfare(inst, x, alpha, mu, &drop);
        CHECK(without < total);
    }

    TEST_CASE("solution feasibility against the channel polytope") {
        RandomInstanceOptions opts;
        opts.n = 4;
        opts.k = 2;
        opts.mrs = true;
        const Instance inst = random_instance(opts, Rng(19));
        const ConvexSolution sol = maximize_expected_welfare(inst);
        const auto& g = inst.graph.graph;
        const auto& o = inst.graph.ordering;
        for (int v = 0; v < 4; ++v) {
            for (int j = 0; j < 2; ++j) {
                const double xi = sol.x[channel_var(v, j, 2)];
                CHECK(xi >= 0.0);
                CHECK(xi <= 1.0);
                double press = 0.0;
                for (int u = 0; u < 4; ++u)
                    if (o.position[u] < o.position[v])
                        press += symmetric_weight(g, u, v) * sol.x[channel_var(u, j, 2)];
                CHECK(press <= o.rho + 1e-9);
            }
        }
    }

    TEST_CASE("exact rounding matches the target marginals") {
        Instance inst;
        inst.graph.graph = ConflictGraph::make_unweighted(2, {{0, 1}});
        inst.graph.ordering = identity_ordering(2, 2.0);
        inst.k = 1;
        inst.valuations = {sym({0.0, 2.0}), sym({0.0, 1.0})};
        validate_instance(inst);
        const ConvexSolution sol = maximize_expected_welfare(inst);
        const double alpha = default_midr_alpha(inst);
        const RoundingPlan plan = make_rounding_plan(inst, sol.x, alpha, 7);
        const std::vector<double> q = rounding_probabilities(sol.x, alpha);

        const int trials = 40000;
        const auto counts =
            count_trials_serial(trials, 2, Rng(3), [&](int, Rng r, std::vector<int64_t>& c) {
                const Allocation a = round_exact(plan, r);
                for (int v = 0; v < 2; ++v)
                    if (a.sets[v]) c[v]++;
            });
        for (int v = 0; v < 2; ++v) {
            const double se = std::sqrt(q[v] * (1 - q[v]) / trials) + 1e-9;
            CHECK(std::abs(counts[v] / double(trials) - q[v]) <= 5 * se);
        }
    }

    TEST_CASE("dyadic simulation agrees with exact rounding") {
        RandomInstanceOptions opts;
        opts.n = 3;
        opts.k = 2;
        opts.mrs = true;
        const Instance inst = random_instance(opts, Rng(43));
        const ConvexSolution sol = maximize_expected_welfare(inst);
        const double alpha = default_midr_alpha(inst);
        const std::vector<double> q = rounding_probabilities(sol.x, alpha);
        SimulationContext ctx = make_simulation_context(inst);

        const int trials = 40000;
        const auto counts =
            count_trials_serial(trials, 6, Rng(3), [&](int, Rng r, std::vector<int64_t>& c) {
                const Allocation a = simulate_midr(ctx, r);
                for (int v = 0; v < 3; ++v)
                    for (int j = 0; j < 2; ++j)
                        if (a.sets[v] & (ChannelSet{1} << j)) c[channel_var(v, j, 2)]++;
            });
        for (int i = 0; i < 6; ++i) {
            const double se = std::sqrt(q[i] * (1 - q[i]) / trials) + 1e-9;
            CHECK(std::abs(counts[i] / double(trials) - q[i]) <= 5 * se);
        }
    }

    TEST_CASE("estimator contract breaches raise simulation_error") {
        Instance inst;
        inst.graph.graph = ConflictGraph(1, true);
        inst.graph.ordering = identity_ordering(1, 0.0);
        inst.k = 1;
        inst.valuations = {sym({0.0, 1.0})};
        validate_instance(inst);
        MidrOptions opts;
        opts.alpha = 0.25;
        // Jumps from 0 to 0.8 between levels 1 and 2: far beyond the dyadic
        // drift any single fixed point allows.
        SimulationContext ctx = make_simulation_context(inst, opts, [](int t) {
            return std::vector<double>{t <= 1 ? 0.0 : 0.8};
        });
        bool threw = false;
        try {
            for (int s = 0; s < 64 && !threw; ++s) simulate_midr(ctx, Rng(s));
        } catch (const simulation_error&) {
            threw = true;
        }
        CHECK(threw);
    }

    TEST_CASE("perturbation grants the full spectrum through beta") {
        Instance inst;
        inst.graph.graph = ConflictGraph(2, true);
        inst.graph.ordering = identity_ordering(2, 0.0);
        inst.k = 3;
        inst.valuations = {sym({0.0, 1.0, 1.0, 1.0}), sym({0.0, 1.0, 1.0, 1.0})};
        validate_instance(inst);
        Allocation base = empty_allocation(2);
        base.sets = {0b111, 0b000};  // allocated share 1/2

        const int trials = 40000;
        const auto counts =
            count_trials_serial(trials, 3, Rng(9), [&](int, Rng r, std::vector<int64_t>& c) {
                const Allocation a = perturb_midr(inst, base, 1.0, r);
                if (a.empty())
                    c[0]++;
                else if (a.sets[0] == 0b111 && a.sets[1] == 0)
                    c[1]++;
                else if (a.sets[1] == 0b111 && a.sets[0] == 0)
                    c[2]++;
            });
        CHECK(counts[0] + counts[1] + counts[2] == trials);
        const double se = std::sqrt(0.25 / trials);
        CHECK(std::abs(counts[0] / double(trials) - 0.5) <= 5 * se);
        CHECK(std::abs(counts[1] / double(trials) - 0.25) <= 5 * se);
        CHECK(std::abs(counts[2] / double(trials) - 0.25) <= 5 * se);

        // mu = 0 is the identity.
        const Allocation same = perturb_midr(inst, base, 0.0, Rng(1));
        CHECK(same.sets == base.sets);
        CHECK_THROWS_AS(perturb_midr(inst, base, 1.5, Rng(1)), parameter_error);
    }
}

TEST_SUITE("mechanism") {
    TEST_CASE("brute force optimum on small fixtures") {
        CHECK(brute_force_optimum(figure_instance(4.0)) == 25.0);
        CHECK(brute_force_optimum(two_user_edge_k2()) == 2.0);
    }

    TEST_CASE("brute force honors its budget guard") {
        RandomInstanceOptions opts;
        opts.n = 17;
        opts.k = 2;
        const Instance inst = random_instance(opts, Rng(3));
        CHECK_THROWS_AS(brute_force_optimum(inst), size_error);
    }

    TEST_CASE("scaled vcg outcome is feasible, priced and deterministic") {
        RandomInstanceOptions opts;
        opts.n = 5;
        opts.k = 2;
        const Instance inst = random_instance(opts, Rng(7));
        const MechanismOutcome a = lavi_swamy_mechanism(inst, Rng(42));
        const MechanismOutcome b = lavi_swamy_mechanism(inst, Rng(42));
        CHECK(a.allocation.sets == b.allocation.sets);
        CHECK(a.payments == b.payments);
        CHECK(allocation_feasible(inst.graph.graph, inst.k, a.allocation));
        CHECK(a.alpha == lavi_swamy_alpha(inst));
        for (int v = 0; v < inst.n(); ++v) {
            CHECK(a.payments[v] >= 0.0);
            const double realized = value(inst.valuations[v], inst.k, a.allocation.sets[v]);
            CHECK(a.payments[v] <= realized + 1e-6);
        }
        CHECK(a.diagnostics.contains("lp_gap"));
    }

    TEST_CASE("scaled vcg rejects matroid-rank valuations") {
        RandomInstanceOptions opts;
        opts.n = 3;
        opts.k = 2;
        opts.mrs = true;
        const Instance inst = random_instance(opts, Rng(9));
        CHECK_THROWS_AS(lavi_swamy_mechanism(inst, Rng(1)), mode_error);
    }

    TEST_CASE("midr outcome is feasible and priced in expectation space") {
        RandomInstanceOptions opts;
        opts.n = 3;
        opts.k = 2;
        opts.mrs = true;
        const Instance inst = random_instance(opts, Rng(15));
        const MechanismOutcome a = midr_mechanism(inst, Rng(42));
        const MechanismOutcome b = midr_mechanism(inst, Rng(42));
        CHECK(a.allocation.sets == b.allocation.sets);
        CHECK(a.payments == b.payments);
        CHECK(allocation_feasible(inst.graph.graph, inst.k, a.allocation));
        const double mu = a.diagnostics["mu"].get<double>();
        for (int v = 0; v < inst.n(); ++v) CHECK(a.payments[v] >= 0.0);
        // Interim rationality: expected pipeline value covers the price up to
        // the certificate slack.
        const ConvexSolution sol = maximize_expected_welfare(inst);
        for (int v = 0; v < inst.n(); ++v) {
            const double pv = pipeline_user_value(inst, sol.x, a.alpha, mu, v);
            CHECK(pv - a.payments[v] >= -1e-6);
        }
    }

    TEST_CASE("truthfulness margins stay within the certificate budget") {
        RandomInstanceOptions opts;
        opts.n = 3;
        opts.k = 2;
        Instance inst = random_instance(opts, Rng(21));
        const TruthfulnessReport ls =
            truthfulness_probe(inst, MechanismKind::lavi_swamy, 12, Rng(2));
        CHECK(ls.min_margin >= -(2e-9 + 1e-9));

        opts.mrs = true;
        opts.n = 2;
        inst = random_instance(opts, Rng(23));
        const TruthfulnessReport md = truthfulness_probe(inst, MechanismKind::midr, 8, Rng(2));
        CHECK(md.min_margin >= -(2e-9 + 1e-9));
    }

    TEST_CASE("monotonicity probe separates the two greedies") {
        const Instance fig = figure_instance(3.0);
        std::vector<double> bids;
        for (const auto& v : fig.valuations) bids.push_back(value_count(v, 1));
        const std::vector<double> grid = {3.0, 4.0};
        const MonotonicityReport lr = monotonicity_probe(fig.graph.graph, fig.graph.ordering,
                                                         bids, 6, grid, true);
        CHECK_FALSE(lr.monotone);
        CHECK(lr.win_bid == 3.0);
        CHECK(lr.lose_bid == 4.0);
        const MonotonicityReport mono = monotonicity_probe(fig.graph.graph, fig.graph.ordering,
                                                           bids, 6, grid, false);
        CHECK(mono.monotone);
    }
}

TEST_SUITE("trials") {
    TEST_CASE("parallel trial engine matches the serial one bitwise") {
        const auto body = [](int t, Rng r) {
            double acc = static_cast<double>(t);
            for (int i = 0; i < 50; ++i) acc += r.next_double();
            return acc;
        };
        const std::vector<double> s = run_trials_serial(2000, Rng(3), body);
        const std::vector<double> p = run_trials_parallel(2000, Rng(3), body);
        CHECK(s == p);
    }

    TEST_CASE("parallel counting engine matches the serial one exactly") {
        const auto body = [](int, Rng r, std::vector<int64_t>& c) {
            c[r.next_below(8)]++;
            c[r.next_below(8)]++;
        };
        const auto s = count_trials_serial(5000, 8, Rng(5), body);
        const auto p = count_trials_parallel(5000, 8, Rng(5), body);
        CHECK(s == p);
        int64_t total = 0;
        for (int64_t c : s) total += c;
        CHECK(total == 10000);
    }

    TEST_CASE("summary statistics on a fixed sample") {
        const TrialStats st = summarize_trials({1.0, 2.0, 3.0, 4.0});
        CHECK(st.trials == 4);
        CHECK(st.mean == 2.5);
        CHECK(st.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
        CHECK(st.standard_error == doctest::Approx(0.6454972243679028).epsilon(1e-12));
        CHECK(st.min == 1.0);
        CHECK(st.max == 4.0);
        CHECK(summarize_trials({}).trials == 0);
    }
}
