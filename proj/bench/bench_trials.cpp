// Throughput comparison between the serial and OpenMP trial engines on a
// representative rounding workload. The parallel engines must reproduce the
// serial results bit for bit; the benchmark enforces that before timing.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specauction/generate.hpp"
#include "specauction/instance.hpp"
#include "specauction/lp.hpp"
#include "specauction/rng.hpp"
#include "specauction/rounding.hpp"
#include "specauction/trials.hpp"

using namespace specauction;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double time_run(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return seconds_since(t0);
}

}  // namespace

int main(int argc, char** argv) {
    const int trials = argc > 1 ? std::stoi(argv[1]) : 200000;

    RandomInstanceOptions opts;
    opts.n = 10;
    opts.k = 8;
    const Instance inst = random_instance(opts, Rng(2024));
    const CountLpSolution frac = solve_count_lp(inst);

    const auto body = [&](int, Rng r) {
        return allocation_welfare(inst, round_unweighted(inst, frac, r));
    };

    std::vector<double> serial, parallel;
    const double t_serial = time_run([&] { serial = run_trials_serial(trials, Rng(7), body); });
    const double t_parallel =
        time_run([&] { parallel = run_trials_parallel(trials, Rng(7), body); });
    if (serial != parallel) {
        std::printf("FAIL: parallel trial engine diverged from the serial one\n");
        return 1;
    }

    const auto count_body = [&](int, Rng r, std::vector<int64_t>& cells) {
        const Allocation a = round_unweighted(inst, frac, r);
        for (int v = 0; v < inst.n(); ++v)
            if (a.sets[v]) cells[v]++;
    };
    std::vector<int64_t> cs, cp;
    const double t_count_serial =
        time_run([&] { cs = count_trials_serial(trials, inst.n(), Rng(9), count_body); });
    const double t_count_parallel =
        time_run([&] { cp = count_trials_parallel(trials, inst.n(), Rng(9), count_body); });
    if (cs != cp) {
        std::printf("FAIL: parallel counting engine diverged from the serial one\n");
        return 1;
    }

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
    {
#pragma omp single
        threads = omp_get_num_threads();
    }
#endif

    const TrialStats st = summarize_trials(serial);
    std::printf("rounding workload: n=%d k=%d, %d trials, mean welfare %.4f\n", inst.n(), inst.k,
                trials, st.mean);
    std::printf("threads: %d\n", threads);
    std::printf("%-18s %10s %14s\n", "engine", "seconds", "trials/sec");
    std::printf("%-18s %10.3f %14.0f\n", "run serial", t_serial, trials / t_serial);
    std::printf("%-18s %10.3f %14.0f  (x%.2f)\n", "run parallel", t_parallel,
                trials / t_parallel, t_serial / t_parallel);
    std::printf("%-18s %10.3f %14.0f\n", "count serial", t_count_serial,
                trials / t_count_serial);
    std::printf("%-18s %10.3f %14.0f  (x%.2f)\n", "count parallel", t_count_parallel,
                trials / t_count_parallel, t_count_serial / t_count_parallel);
    std::printf("outputs identical across engines\n");
    return 0;
}
