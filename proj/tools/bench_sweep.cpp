// Benchmark of the threshold sweep: serial reference path (jobs=1) against
// the OpenMP pair-parallel path, with a result-equality check.

#include "yamabe/table_runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

using namespace yamabe;

namespace {

double run_once(const std::vector<DimensionPair>& pairs, const SolveSettings& settings,
                int jobs, std::vector<PairOutcome>& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = run_pairs(pairs, settings, jobs);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
    std::vector<DimensionPair> pairs;
    for (const auto& r : reference_thresholds()) pairs.push_back({r.m, r.n});
    SolveSettings settings;
    const int hw = std::max(1u, std::thread::hardware_concurrency());

    std::vector<PairOutcome> serial, parallel;
    run_once(pairs, settings, 1, serial); // warm-up
    double t_serial = 1e300, t_parallel = 1e300;
    for (int i = 0; i < repeats; ++i) {
        t_serial = std::min(t_serial, run_once(pairs, settings, 1, serial));
        t_parallel = std::min(t_parallel, run_once(pairs, settings, hw, parallel));
    }

    bool identical = serial.size() == parallel.size();
    for (size_t i = 0; identical && i < serial.size(); ++i) {
        identical = serial[i].ok == parallel[i].ok &&
                    serial[i].result.lambda_mn == parallel[i].result.lambda_mn;
    }

    std::printf("pairs            %zu\n", pairs.size());
    std::printf("serial (jobs=1)  %.3f s\n", t_serial);
    std::printf("openmp (jobs=%d) %.3f s\n", hw, t_parallel);
    std::printf("speedup          %.2fx\n", t_serial / t_parallel);
    std::printf("results          %s\n", identical ? "bit-identical" : "MISMATCH");
    return identical ? 0 : 1;
}
