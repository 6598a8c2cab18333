#pragma once

#include "yamabe/profile_cache.hpp"
#include "yamabe/stability.hpp"

#include <span>
#include <string>
#include <vector>

namespace yamabe {

struct DimensionPair {
    int m;
    int n;
};

/// One bundle of every solver setting, shared by the CLI and the sweep.
struct SolveSettings {
    ShootConfig shoot;
    StabilityConfig stability;
};

struct PairOutcome {
    int m = 0;
    int n = 0;
    bool ok = false;
    std::string error;  ///< set when ok is false
    LambdaResult result{}; ///< valid when ok
};

/// Computes the threshold for each pair. jobs > 1 distributes pairs over
/// OpenMP workers; jobs == 1 is the serial reference path and jobs <= 0 picks
/// the hardware default. Outcomes are returned in input order regardless of
/// scheduling, so output bytes never depend on the worker count. Per-pair
/// failures are reported inline without aborting the rest.
std::vector<PairOutcome> run_pairs(std::span<const DimensionPair> pairs,
                                   const SolveSettings& settings, int jobs,
                                   const ProfileCache& cache = {});

struct ReferenceThreshold {
    int m;
    int n;
    double lambda;
};

/// The 21 published threshold values bundled for offline comparison, in their
/// published order.
std::span<const ReferenceThreshold> reference_thresholds();

/// Bundled value for one pair, or nullptr when the pair is not in the set.
const ReferenceThreshold* find_reference(int m, int n);

} // namespace yamabe
