#include "yamabe/profile_cache.hpp"

#include "yamabe/errors.hpp"

#include <cstdio>
#include <string>

namespace yamabe {

namespace {

std::string hex_token(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

} // namespace

std::filesystem::path ProfileCache::key_path(const ProblemDims& dims, bool unit_normalization,
                                             const ShootConfig& config) const {
    std::string name = "gs-v1-";
    name += unit_normalization ? "unit" : "curv";
    name += "-m" + std::to_string(dims.m) + "-n" + std::to_string(dims.n);
    name += "-M" + std::to_string(config.grid_intervals);
    name += "-tb" + hex_token(config.tol_beta);
    name += "-at" + hex_token(config.ode.abs_tol);
    name += "-rt" + hex_token(config.ode.rel_tol);
    name += ".profile";
    return dir_ / name;
}

RadialProfile ProfileCache::get_or_compute(const ProblemDims& dims, bool unit_normalization,
                                           const ShootConfig& config) const {
    const auto compute = [&] {
        return unit_normalization ? shoot_unit_ground_state(dims, config)
                                  : shoot_ground_state(dims, config);
    };
    if (!enabled()) return compute();

    const std::filesystem::path path = key_path(dims, unit_normalization, config);
    if (std::filesystem::exists(path)) {
        try {
            RadialProfile profile = load_profile(path);
            const double kappa = unit_normalization ? 1.0 : dims.kappa();
            const bool matches = profile.dims.m == dims.m && profile.dims.n == dims.n &&
                                 profile.kappa == kappa &&
                                 profile.values.size() ==
                                     static_cast<size_t>(config.grid_intervals) + 1 &&
                                 profile.tol_beta == config.tol_beta &&
                                 profile.abs_tol == config.ode.abs_tol &&
                                 profile.rel_tol == config.ode.rel_tol;
            if (matches) return profile;
        } catch (const CacheError&) {
            // fall through to recompute
        }
    }
    RadialProfile profile = compute();
    std::filesystem::create_directories(dir_);
    save_profile(profile, path);
    return profile;
}

} // namespace yamabe
