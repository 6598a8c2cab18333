#pragma once

#include "yamabe/dims.hpp"
#include "yamabe/radial_ode.hpp"

#include <filesystem>
#include <vector>

namespace yamabe {

/// Controls for the ground-state shooting and the stored profile.
struct ShootConfig {
    double tol_beta = 1e-12;     ///< relative bracket width on f(0)
    int grid_intervals = 4096;   ///< stored grid has grid_intervals + 1 nodes
    double horizon_factor = 40.0; ///< shooting horizon = factor / decay rate
    double grid_factor = 25.0;    ///< stored grid spans factor / decay rate
    StepControl ode;
    int max_bisections = 200;
};

/// Sampled radial ground state on a uniform grid with an exponential tail
/// model beyond it. Solves u'' + ((n-1)/t) u' = kappa (u - u^{p-1}) with
/// u(0) = beta, u'(0) = 0; kappa = s_g/a_N for the curvature normalization,
/// kappa = 1 for the unit normalization.
struct RadialProfile {
    ProblemDims dims;
    double kappa = 0.0;
    double beta = 0.0;      ///< converged shooting parameter f(0)
    double grid_step = 0.0; ///< uniform node spacing
    std::vector<double> values;
    std::vector<double> derivs;
    double tail_rate = 0.0;      ///< decay exponent mu = sqrt(kappa)
    double tail_amplitude = 0.0; ///< least-squares A of f ~ A t^{-(n-1)/2} e^{-mu t}
    // Solver settings the profile was produced under (part of the cache key).
    double tol_beta = 0.0;
    double abs_tol = 0.0;
    double rel_tol = 0.0;

    double t_grid() const { return grid_step * (values.size() - 1); }

    /// Cubic Hermite interpolation on the grid; beyond t_grid the tail model
    /// re-anchored at the last node (continuous across the junction).
    double eval(double t) const;
    double eval_deriv(double t) const;

    /// Tail amplitude that makes the model hit the last grid node exactly.
    /// All evaluation and tail quadrature use this anchored amplitude; the
    /// stored tail_amplitude is the least-squares fit it is checked against.
    double anchored_amplitude() const;
};

/// Shoots the curvature-normalized ground state (kappa = s_g/a_N) by bisection
/// on beta = f(0): zero-crossing trajectories bracket from above, positive
/// local minima from below.
RadialProfile shoot_ground_state(const ProblemDims& dims, const ShootConfig& config = {});

/// Shoots the unit-normalized ground state -Dw + w = w^{p-1} (kappa = 1); the
/// second route to the curvature normalization via rescale_normalized.
RadialProfile shoot_unit_ground_state(const ProblemDims& dims, const ShootConfig& config = {});

/// Maps a unit-normalized profile onto the curvature normalization through
/// f(t) = w(sqrt(s_g/a_N) t). Rejects profiles with mismatched dimensions or
/// normalization.
RadialProfile rescale_normalized(const RadialProfile& w, const ProblemDims& dims);

/// Writes the profile as a self-describing text document with hexadecimal
/// floats (bit-exact round trip). The write is atomic (temp file + rename).
void save_profile(const RadialProfile& profile, const std::filesystem::path& path);

/// Reads a profile written by save_profile; throws CacheError on malformed or
/// version-mismatched input.
RadialProfile load_profile(const std::filesystem::path& path);

} // namespace yamabe
