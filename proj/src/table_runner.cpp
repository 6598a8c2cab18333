#include "yamabe/table_runner.hpp"

#include "yamabe/errors.hpp"

#include <array>
#include <exception>
#include <thread>

#ifdef YAMABE_HAVE_OPENMP
#include <omp.h>
#endif

namespace yamabe {

namespace {

constexpr std::array<ReferenceThreshold, 21> kReference{{
    {2, 2, 1.8041}, {3, 2, 2.9183}, {2, 3, 1.6735}, {2, 4, 1.5823}, {3, 3, 2.8372},
    {4, 2, 3.9553}, {2, 5, 1.5145}, {3, 4, 2.7669}, {4, 3, 3.9023}, {5, 2, 4.9718},
    {2, 6, 1.4459}, {3, 5, 2.7070}, {4, 4, 3.8506}, {5, 3, 4.9348}, {6, 2, 5.9806},
    {2, 7, 1.4165}, {3, 6, 2.6551}, {4, 5, 3.8028}, {5, 4, 4.8958}, {6, 3, 5.9533},
    {7, 2, 6.9859},
}};

PairOutcome solve_pair(const DimensionPair& pair, const SolveSettings& settings,
                       const ProfileCache& cache) {
    PairOutcome out;
    out.m = pair.m;
    out.n = pair.n;
    try {
        const ProblemDims dims = make_dims(pair.m, pair.n);
        const RadialProfile profile = cache.get_or_compute(dims, false, settings.shoot);
        out.result = find_lambda(dims, profile, settings.stability);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

std::vector<PairOutcome> run_pairs(std::span<const DimensionPair> pairs,
                                   const SolveSettings& settings, int jobs,
                                   const ProfileCache& cache) {
    std::vector<PairOutcome> out(pairs.size());
    if (jobs <= 0) {
        jobs = static_cast<int>(std::thread::hardware_concurrency());
        if (jobs <= 0) jobs = 1;
    }
#ifdef YAMABE_HAVE_OPENMP
    if (jobs > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pairs.size()); ++i) {
            out[i] = solve_pair(pairs[i], settings, cache);
        }
        return out;
    }
#endif
    for (size_t i = 0; i < pairs.size(); ++i) {
        out[i] = solve_pair(pairs[i], settings, cache);
    }
    return out;
}

std::span<const ReferenceThreshold> reference_thresholds() { return kReference; }

const ReferenceThreshold* find_reference(int m, int n) {
    for (const auto& ref : kReference) {
        if (ref.m == m && ref.n == n) return &ref;
    }
    return nullptr;
}

} // namespace yamabe
