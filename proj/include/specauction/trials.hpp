#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "specauction/rng.hpp"

namespace specauction {

// Monte Carlo drivers. Every trial draws from its own keyed stream and writes
// its own slot, so the parallel engine produces the same vector as the serial
// one; downstream reductions then run serially over identical data.

template <typename Body>
std::vector<double> run_trials_serial(int trials, const Rng& rng, Body&& body) {
    std::vector<double> out(trials);
    for (int t = 0; t < trials; ++t) out[t] = body(t, rng.fork(t));
    return out;
}

template <typename Body>
std::vector<double> run_trials_parallel(int trials, const Rng& rng, Body&& body) {
    std::vector<double> out(trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int t = 0; t < trials; ++t) out[t] = body(t, rng.fork(t));
    return out;
}

// Cell-count variant for marginal estimation: body increments integer cells,
// per-thread accumulators merge by addition. Integer sums commute exactly,
// so this too matches its serial twin bit for bit.

template <typename Body>
std::vector<int64_t> count_trials_serial(int trials, int cells, const Rng& rng, Body&& body) {
    std::vector<int64_t> total(cells, 0);
    for (int t = 0; t < trials; ++t) body(t, rng.fork(t), total);
    return total;
}

template <typename Body>
std::vector<int64_t> count_trials_parallel(int trials, int cells, const Rng& rng, Body&& body) {
    std::vector<int64_t> total(cells, 0);
#ifdef _OPENMP
#pragma omp parallel
    {
        std::vector<int64_t> local(cells, 0);
#pragma omp for schedule(dynamic, 16) nowait
        for (int t = 0; t < trials; ++t) body(t, rng.fork(t), local);
#pragma omp critical
        {
            for (int c = 0; c < cells; ++c) total[c] += local[c];
        }
    }
#else
    for (int t = 0; t < trials; ++t) body(t, rng.fork(t), total);
#endif
    return total;
}

struct TrialStats {
    int trials = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    double standard_error = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline TrialStats summarize_trials(const std::vector<double>& values) {
    TrialStats s;
    s.trials = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.trials;
    if (s.trials > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.variance = sq / (s.trials - 1);
        s.standard_error = std::sqrt(s.variance / s.trials);
    }
    return s;
}

}  // namespace specauction
