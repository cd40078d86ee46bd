// Command line front end: generate instances, run allocation algorithms and
// auctions, and verify mechanism properties. Exit codes: 0 success, 1 a
// verification failed, 2 usage, 3 bad input, 4 internal numeric failure.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

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

namespace {

using namespace specauction;
using nlohmann::json;

constexpr const char* kVersion = "specauction 1.0.0";

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// All file output goes through a temp file plus rename so readers never see
// a partial write.
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw parameter_error("cannot open output file: " + path);
        os << content;
    }
    std::filesystem::rename(tmp, path);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_file_atomic(path, content);
}

Instance load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parameter_error("cannot open instance file: " + path);
    json j;
    is >> j;
    Instance inst = j.get<Instance>();
    validate_instance(inst);
    return inst;
}

std::vector<double> full_spectrum_bids(const Instance& inst) {
    const ChannelSet full =
        inst.k >= 32 ? ~ChannelSet{0} : (ChannelSet{1} << inst.k) - 1;
    std::vector<double> bids(inst.n());
    for (int v = 0; v < inst.n(); ++v) bids[v] = value(inst.valuations[v], inst.k, full);
    return bids;
}

// The conflict graph of the worked example: seven users, k = 1, user 6's bid
// is the free parameter that exhibits the non-monotonicity of the subtract
// and reconsider greedy.
Instance figure_instance(double x) {
    ConflictGraph g = ConflictGraph::make_unweighted(
        7, {{6, 5}, {6, 0}, {5, 4}, {5, 3}, {4, 3}, {4, 2}, {4, 1}, {3, 0}, {2, 0}, {1, 0}});
    Instance inst;
    inst.graph.graph = g;
    inst.graph.ordering.position = {0, 1, 2, 3, 4, 5, 6};
    inst.graph.ordering.rho = rho_of_ordering(g, inst.graph.ordering.position);
    inst.k = 1;
    const std::vector<double> bids = {11.5, 7.0, 7.0, 7.0, 6.0, 6.0, x};
    for (double b : bids)
        inst.valuations.emplace_back(SymmetricValuation{{0.0, b}});
    inst.meta["name"] = "figure-example";
    inst.meta["x"] = x;
    validate_instance(inst);
    return inst;
}

struct RunRow {
    int trial = 0;
    double welfare = 0.0;
    double payment_total = 0.0;
    bool feasible = true;
    double runtime_ms = 0.0;
};

std::string render_csv(const std::string& alg, const std::vector<RunRow>& rows,
                       double fractional_optimum, double alpha, bool timings) {
    std::ostringstream os;
    os << "trial,algorithm,welfare,payment_total,feasible,fractional_optimum,alpha,runtime_ms\n";
    for (const RunRow& r : rows) {
        os << r.trial << ',' << alg << ',' << format_double(r.welfare) << ','
           << format_double(r.payment_total) << ',' << (r.feasible ? 1 : 0) << ','
           << format_double(fractional_optimum) << ',' << format_double(alpha) << ','
           << format_double(timings ? r.runtime_ms : 0.0) << '\n';
    }
    return os.str();
}

int cmd_generate(const std::string& model, int n, int k, uint64_t seed, bool weighted, bool mrs,
                 double edge_prob, double weight_scale, double radius, double pathloss,
                 double sinr, double noise, const std::string& out) {
    Rng rng(seed);
    Instance inst;
    if (model == "random") {
        RandomInstanceOptions ropts;
        ropts.n = n;
        ropts.k = k;
        ropts.weighted = weighted;
        ropts.mrs = mrs;
        ropts.edge_probability = edge_prob;
        ropts.weight_scale = weight_scale;
        inst = random_instance(ropts, rng);
    } else if (model == "protocol") {
        Rng geo = rng.fork(10);
        std::vector<Point> points(n);
        for (int v = 0; v < n; ++v) {
            points[v].x = geo.next_double();
            points[v].y = geo.next_double();
        }
        inst.graph = gen_protocol_model(points, radius);
        inst.k = k;
        for (int v = 0; v < n; ++v) {
            const Rng vr = rng.fork(20, v);
            if (mrs)
                inst.valuations.emplace_back(random_mrs_valuation(k, vr));
            else
                inst.valuations.emplace_back(random_symmetric_valuation(k, vr));
        }
        validate_instance(inst);
    } else {  // physical
        Rng geo = rng.fork(10);
        std::vector<Link> links(n);
        for (int v = 0; v < n; ++v) {
            links[v].sender.x = geo.next_double();
            links[v].sender.y = geo.next_double();
            // Short links keep every link feasible alone under the defaults.
            links[v].receiver.x = links[v].sender.x + 0.02 * (geo.next_double() - 0.5);
            links[v].receiver.y = links[v].sender.y + 0.02 * (geo.next_double() - 0.5);
        }
        PhysicalParams params;
        params.pathloss = pathloss;
        params.sinr_threshold = sinr;
        params.noise = noise;
        inst.graph = gen_physical_model(links, params);
        inst.k = k;
        for (int v = 0; v < n; ++v) {
            const Rng vr = rng.fork(20, v);
            if (mrs)
                inst.valuations.emplace_back(random_mrs_valuation(k, vr));
            else
                inst.valuations.emplace_back(random_symmetric_valuation(k, vr));
        }
        validate_instance(inst);
    }
    inst.meta["model"] = model;
    inst.meta["seed"] = seed;
    json j = inst;
    emit(out, j.dump(2) + "\n");
    return 0;
}

int cmd_run(const std::string& in, const std::string& alg, int trials, uint64_t seed, double tol,
            double alpha_start, double mu, const std::string& out, bool timings,
            const std::string& dump_lp, const std::string& dump_json) {
    const Instance inst = load_instance(in);
    const Rng rng(seed);

    if (!dump_lp.empty()) {
        const PackingLp lp = build_symmetric_lp(inst);
        std::ostringstream os;
        write_lp_text(os, lp, "count_form");
        write_file_atomic(dump_lp, os.str());
    }

    std::vector<RunRow> rows;
    double fractional_optimum = 0.0;
    double alpha = 0.0;
    json last = json::object();

    auto timed = [&](int t, auto&& body) {
        RunRow row;
        row.trial = t;
        const auto t0 = std::chrono::steady_clock::now();
        body(row);
        const auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rows.push_back(row);
    };

    auto record = [&](RunRow& row, const Allocation& alloc, const std::vector<double>* pay) {
        row.welfare = allocation_welfare(inst, alloc);
        row.feasible = allocation_feasible(inst.graph.graph, inst.k, alloc);
        if (pay)
            for (double p : *pay) row.payment_total += p;
        last = json{{"allocation", alloc}, {"welfare", row.welfare}};
        if (pay) last["payments"] = *pay;
    };

    if (alg == "alg1" || alg == "alg2") {
        const CountLpSolution frac = solve_count_lp(inst, tol);
        fractional_optimum = frac.objective_value;
        for (int t = 0; t < trials; ++t)
            timed(t, [&](RunRow& row) {
                const Allocation alloc = alg == "alg1"
                                             ? round_unweighted(inst, frac, rng.fork(t))
                                             : round_weighted(inst, frac, rng.fork(t));
                record(row, alloc, nullptr);
            });
    } else if (alg == "greedy-lr" || alg == "greedy-monotone") {
        const std::vector<double> bids = full_spectrum_bids(inst);
        for (int t = 0; t < trials; ++t)
            timed(t, [&](RunRow& row) {
                const VertexSet chosen =
                    alg == "greedy-lr"
                        ? local_ratio_greedy(inst.graph.graph, inst.graph.ordering, bids).chosen
                        : monotone_greedy(inst.graph.graph, inst.graph.ordering, bids);
                Allocation alloc = empty_allocation(inst.n());
                const ChannelSet full =
                    inst.k >= 32 ? ~ChannelSet{0} : (ChannelSet{1} << inst.k) - 1;
                for (int v : chosen) alloc.sets[v] = full;
                record(row, alloc, nullptr);
            });
    } else if (alg == "lavi-swamy") {
        LaviSwamyOptions lopts;
        lopts.tol = tol;
        for (int t = 0; t < trials; ++t)
            timed(t, [&](RunRow& row) {
                const MechanismOutcome o = lavi_swamy_mechanism(inst, rng.fork(t), lopts);
                if (t == 0) {
                    fractional_optimum = o.fractional_optimum;
                    alpha = o.alpha;
                }
                record(row, o.allocation, &o.payments);
            });
    } else if (alg == "midr" || alg == "midr-sim") {
        MidrOptions mopts;
        mopts.tol_gap = tol;
        if (alpha_start > 0.0) mopts.alpha = alpha_start;
        if (mu >= 0.0) mopts.mu = mu;
        if (alg == "midr") {
            for (int t = 0; t < trials; ++t)
                timed(t, [&](RunRow& row) {
                    const MechanismOutcome o = midr_mechanism(inst, rng.fork(t), mopts);
                    if (t == 0) {
                        fractional_optimum = o.fractional_optimum;
                        alpha = o.alpha;
                    }
                    record(row, o.allocation, &o.payments);
                });
        } else {
            SimulationContext ctx = make_simulation_context(inst, mopts);
            alpha = ctx.alpha;
            const double mu_used = mopts.mu >= 0.0 ? mopts.mu : default_midr_mu(inst.n(), inst.k);
            for (int t = 0; t < trials; ++t)
                timed(t, [&](RunRow& row) {
                    const Rng tr = rng.fork(t);
                    const Allocation drawn = simulate_midr(ctx, tr.fork(21));
                    const Allocation alloc = perturb_midr(inst, drawn, mu_used, tr.fork(22));
                    record(row, alloc, nullptr);
                });
        }
    } else {
        throw parameter_error("unknown algorithm: " + alg);
    }

    emit(out, render_csv(alg, rows, fractional_optimum, alpha, timings));
    if (!dump_json.empty()) write_file_atomic(dump_json, last.dump(2) + "\n");
    return 0;
}

int verify_feasibility(const Instance& inst, const std::string& alg, int trials, uint64_t seed,
                       double tol) {
    const Rng rng(seed);
    int bad = 0;
    if (alg == "alg1" || alg == "alg2") {
        const CountLpSolution frac = solve_count_lp(inst, tol);
        for (int t = 0; t < trials; ++t) {
            const Allocation alloc = alg == "alg1" ? round_unweighted(inst, frac, rng.fork(t))
                                                   : round_weighted(inst, frac, rng.fork(t));
            if (!allocation_feasible(inst.graph.graph, inst.k, alloc)) ++bad;
        }
    } else if (alg == "lavi-swamy") {
        LaviSwamyOptions lopts;
        lopts.tol = tol;
        for (int t = 0; t < trials; ++t) {
            const MechanismOutcome o = lavi_swamy_mechanism(inst, rng.fork(t), lopts);
            if (!allocation_feasible(inst.graph.graph, inst.k, o.allocation)) ++bad;
        }
    } else if (alg == "midr") {
        MidrOptions mopts;
        mopts.tol_gap = tol;
        const ConvexSolution sol = maximize_expected_welfare(inst, mopts);
        const double alpha = default_midr_alpha(inst);
        const RoundingPlan plan = make_rounding_plan(inst, sol.x, alpha, mopts.oracle_seed);
        const double mu = default_midr_mu(inst.n(), inst.k);
        for (int t = 0; t < trials; ++t) {
            const Rng tr = rng.fork(t);
            const Allocation alloc =
                perturb_midr(inst, round_exact(plan, tr.fork(21)), mu, tr.fork(22));
            if (!allocation_feasible(inst.graph.graph, inst.k, alloc)) ++bad;
        }
    } else {
        throw parameter_error("feasibility check supports alg1, alg2, lavi-swamy, midr");
    }
    std::cout << "feasibility " << alg << ": " << (trials - bad) << "/" << trials
              << " feasible\n";
    return bad == 0 ? 0 : 1;
}

int verify_marginals(const Instance& inst, uint64_t seed, double tol, double alpha_start,
                     bool corrupt_alpha) {
    const CountLpSolution frac = solve_count_lp(inst, tol);
    const double alpha = alpha_start > 0.0 ? alpha_start : lavi_swamy_alpha(inst);
    const Decomposition dec = decompose_count_solution(inst, frac.x, alpha, Rng(seed));
    const double check_alpha = corrupt_alpha ? dec.alpha_achieved * 2.0 : dec.alpha_achieved;
    const DecompositionReport rep = verify_count_decomposition(inst, dec, frac.x, check_alpha);
    std::cout << "marginals: lambda_sum_error=" << format_double(rep.lambda_sum_error)
              << " max_marginal_error=" << format_double(rep.max_marginal_error)
              << " alpha=" << format_double(dec.alpha_achieved) << (rep.ok ? " ok" : " FAIL")
              << "\n";
    return rep.ok ? 0 : 1;
}

int verify_monotonicity(const Instance& inst, const std::string& alg, const std::string& expect) {
    const std::vector<double> bids = full_spectrum_bids(inst);
    double top = 1.0;
    for (double b : bids) top = std::max(top, b);
    std::vector<double> grid;
    for (int i = 1; i <= 40; ++i) grid.push_back(top * 1.25 * i / 40.0);
    const bool lr = alg == "greedy-lr";
    MonotonicityReport worst;
    for (int v = 0; v < inst.n(); ++v) {
        const MonotonicityReport rep =
            monotonicity_probe(inst.graph.graph, inst.graph.ordering, bids, v, grid, lr);
        if (!rep.monotone) {
            worst = rep;
            break;
        }
    }
    if (worst.user >= 0)
        std::cout << "monotonicity " << alg << ": user " << worst.user << " wins at "
                  << format_double(worst.win_bid) << " but loses at "
                  << format_double(worst.lose_bid) << "\n";
    else
        std::cout << "monotonicity " << alg << ": no violation on the grid\n";
    if (expect == "monotone") return worst.user < 0 ? 0 : 1;
    if (expect == "witness") return worst.user >= 0 ? 0 : 1;
    return 0;
}

int verify_truthfulness(const Instance& inst, const std::string& mechanism, int trials,
                        uint64_t seed, double tol, double margin_tol) {
    const MechanismKind kind =
        mechanism == "midr" ? MechanismKind::midr : MechanismKind::lavi_swamy;
    const TruthfulnessReport rep = truthfulness_probe(inst, kind, trials, Rng(seed), tol);
    const double budget = margin_tol > 0.0 ? margin_tol : 2.0 * tol + 1e-9;
    std::cout << "truthfulness " << mechanism << ": min_margin="
              << format_double(rep.min_margin) << " budget=" << format_double(budget)
              << (rep.min_margin >= -budget ? " ok" : " FAIL") << "\n";
    return rep.min_margin >= -budget ? 0 : 1;
}

int verify_decomposition(const Instance& inst, uint64_t seed, double tol, double alpha_start,
                         bool corrupt_alpha) {
    // Channel-form witness: decompose each channel column of the convex
    // optimizer's point.
    MidrOptions mopts;
    mopts.tol_gap = tol;
    const ConvexSolution sol = maximize_expected_welfare(inst, mopts);
    const double alpha = alpha_start > 0.0 ? alpha_start : default_midr_alpha(inst);
    const RoundingPlan plan = make_rounding_plan(inst, sol.x, alpha, seed);
    bool ok = true;
    double worst = 0.0;
    for (int j = 0; j < inst.k; ++j) {
        std::vector<double> col(inst.n());
        for (int v = 0; v < inst.n(); ++v) col[v] = sol.x[channel_var(v, j, inst.k)];
        const double achieved = plan.per_channel[j].alpha_achieved;
        const DecompositionReport rep = verify_channel_decomposition(
            inst.graph.graph, plan.per_channel[j], col,
            corrupt_alpha ? achieved * 2.0 : achieved);
        ok = ok && rep.ok;
        worst = std::max(worst, rep.max_marginal_error);
    }
    std::cout << "decomposition: channels=" << inst.k
              << " max_marginal_error=" << format_double(worst) << (ok ? " ok" : " FAIL")
              << "\n";
    return ok ? 0 : 1;
}

int verify_golden_figure() {
    // Frozen expectations for the worked example at x = 3 and x = 4.
    const Instance low = figure_instance(3.0);
    const Instance high = figure_instance(4.0);
    const std::vector<double> bids_low = full_spectrum_bids(low);
    const std::vector<double> bids_high = full_spectrum_bids(high);

    bool ok = true;
    auto expect = [&](bool cond, const char* what) {
        if (!cond) {
            std::cout << "golden: FAIL " << what << "\n";
            ok = false;
        }
    };

    const LocalRatioResult lr_low =
        local_ratio_greedy(low.graph.graph, low.graph.ordering, bids_low);
    expect(lr_low.chosen == VertexSet({1, 2, 3, 6}), "low chosen set");
    double welfare_low = 0.0;
    for (int v : lr_low.chosen) welfare_low += bids_low[v];
    expect(welfare_low == 24.0, "low welfare");
    const std::vector<double> res_low = {-0.5, 4.0, 4.0, 1.0, 3.0, 3.0, 3.0};
    for (int v = 0; v < 7; ++v)
        expect(std::abs(lr_low.residuals[v] - res_low[v]) < 1e-12, "low residuals");

    const LocalRatioResult lr_high =
        local_ratio_greedy(high.graph.graph, high.graph.ordering, bids_high);
    expect(lr_high.chosen == VertexSet({0, 4}), "high chosen set");
    double welfare_high = 0.0;
    for (int v : lr_high.chosen) welfare_high += bids_high[v];
    expect(welfare_high == 17.5, "high welfare");
    const std::vector<double> res_high = {0.5, 3.0, 3.0, 1.0, 4.0, 2.0, 4.0};
    for (int v = 0; v < 7; ++v)
        expect(std::abs(lr_high.residuals[v] - res_high[v]) < 1e-12, "high residuals");

    expect(monotone_greedy(high.graph.graph, high.graph.ordering, bids_high) ==
               VertexSet({0, 4}),
           "monotone high chosen set");
    expect(std::abs(brute_force_optimum(high) - 25.0) < 1e-12, "high optimum");
    expect(low.graph.ordering.rho == 6.0, "identity ordering rho");

    std::cout << (ok ? "golden: ok\n" : "golden: FAIL\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truthful secondary spectrum auctions on conflict graphs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a random instance");
    std::string gen_model = "random";
    int gen_n = 6, gen_k = 3;
    uint64_t gen_seed = 1;
    bool gen_weighted = false, gen_mrs = false;
    double gen_edge_prob = 0.5, gen_weight_scale = 0.6, gen_radius = 0.35;
    double gen_pathloss = 3.0, gen_sinr = 2.0, gen_noise = 0.1;
    std::string gen_out;
    gen->add_option("--model", gen_model, "random | protocol | physical")
        ->check(CLI::IsMember({"random", "protocol", "physical"}));
    gen->add_option("--n", gen_n, "number of users");
    gen->add_option("--k", gen_k, "number of channels");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_flag("--weighted", gen_weighted, "weighted conflict graph (random model)");
    gen->add_flag("--mrs", gen_mrs, "matroid rank sum valuations");
    gen->add_option("--edge-prob", gen_edge_prob, "edge probability (random model)");
    gen->add_option("--weight-scale", gen_weight_scale, "weight scale (random weighted)");
    gen->add_option("--radius", gen_radius, "conflict radius (protocol model)");
    gen->add_option("--pathloss", gen_pathloss, "pathloss exponent (physical model)");
    gen->add_option("--sinr", gen_sinr, "sinr threshold (physical model)");
    gen->add_option("--noise", gen_noise, "ambient noise (physical model)");
    gen->add_option("--out", gen_out, "output file (stdout when empty)");

    // run
    auto* run = app.add_subcommand("run", "Run an algorithm on an instance");
    std::string run_in, run_alg = "alg1", run_out, run_dump_lp, run_dump_json;
    int run_trials = 1;
    uint64_t run_seed = 1;
    double run_tol = 1e-9, run_alpha = 0.0, run_mu = -1.0;
    bool run_timings = false;
    run->add_option("--in", run_in, "instance file")->required();
    run->add_option("--alg", run_alg,
                    "alg1 | alg2 | lavi-swamy | midr | midr-sim | greedy-lr | greedy-monotone")
        ->check(CLI::IsMember({"alg1", "alg2", "lavi-swamy", "midr", "midr-sim", "greedy-lr",
                               "greedy-monotone"}));
    run->add_option("--trials", run_trials, "independent trials");
    run->add_option("--seed", run_seed, "rng seed");
    run->add_option("--tol", run_tol, "certificate tolerance");
    run->add_option("--alpha-start", run_alpha, "override the lottery scale");
    run->add_option("--mu", run_mu, "override the perturbation mass");
    run->add_option("--out", run_out, "CSV output file (stdout when empty)");
    run->add_flag("--timings", run_timings, "fill the runtime column (off keeps output stable)");
    run->add_option("--dump-lp", run_dump_lp, "write the count-form LP as text");
    run->add_option("--dump-json", run_dump_json, "write the last trial's outcome as JSON");

    // verify
    auto* ver = app.add_subcommand("verify", "Check a mechanism property");
    std::string ver_mode, ver_in, ver_alg = "alg1", ver_mech = "lavi-swamy", ver_expect;
    int ver_trials = 100;
    uint64_t ver_seed = 1;
    double ver_tol = 1e-9, ver_alpha = 0.0, ver_margin = 0.0;
    bool ver_corrupt = false;
    ver->add_option("mode", ver_mode,
                    "feasibility | marginals | monotonicity | truthfulness | decomposition | "
                    "golden-fig")
        ->required()
        ->check(CLI::IsMember({"feasibility", "marginals", "monotonicity", "truthfulness",
                               "decomposition", "golden-fig"}));
    ver->add_option("--in", ver_in, "instance file");
    ver->add_option("--alg", ver_alg, "algorithm for feasibility / monotonicity");
    ver->add_option("--mechanism", ver_mech, "lavi-swamy | midr");
    ver->add_option("--expect", ver_expect, "monotone | witness (monotonicity mode)");
    ver->add_option("--trials", ver_trials, "trial count");
    ver->add_option("--seed", ver_seed, "rng seed");
    ver->add_option("--tol", ver_tol, "certificate tolerance");
    ver->add_option("--alpha-start", ver_alpha, "override the lottery scale");
    ver->add_option("--margin-tol", ver_margin, "truthfulness margin budget");
    ver->add_flag("--corrupt-alpha", ver_corrupt,
                  "verify against a wrong scale (the check must then fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_model, gen_n, gen_k, gen_seed, gen_weighted, gen_mrs,
                                gen_edge_prob, gen_weight_scale, gen_radius, gen_pathloss,
                                gen_sinr, gen_noise, gen_out);
        if (run->parsed())
            return cmd_run(run_in, run_alg, run_trials, run_seed, run_tol, run_alpha, run_mu,
                           run_out, run_timings, run_dump_lp, run_dump_json);
        if (ver->parsed()) {
            if (ver_mode == "golden-fig") return verify_golden_figure();
            if (ver_in.empty()) throw parameter_error("verify mode needs --in");
            const Instance inst = load_instance(ver_in);
            if (ver_mode == "feasibility")
                return verify_feasibility(inst, ver_alg, ver_trials, ver_seed, ver_tol);
            if (ver_mode == "marginals")
                return verify_marginals(inst, ver_seed, ver_tol, ver_alpha, ver_corrupt);
            if (ver_mode == "monotonicity")
                return verify_monotonicity(inst, ver_alg, ver_expect);
            if (ver_mode == "truthfulness")
                return verify_truthfulness(inst, ver_mech, ver_trials, ver_seed, ver_tol,
                                           ver_margin);
            return verify_decomposition(inst, ver_seed, ver_tol, ver_alpha, ver_corrupt);
        }
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const mode_error& e) {
        std::cerr << "mode error: " << e.what() << "\n";
        return 3;
    } catch (const size_error& e) {
        std::cerr << "size error: " << e.what() << "\n";
        return 3;
    } catch (const parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
