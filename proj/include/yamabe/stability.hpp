#pragma once

#include "yamabe/dims.hpp"
#include "yamabe/ground_state.hpp"
#include "yamabe/radial_ode.hpp"

namespace yamabe {

/// Coefficients of the linear stability equation
///   u'' + ((n-1)/t) u' + (C f^{p-2} - K) u = 0,  u(0) = 1, u'(0) = 0.
struct LinearCoefficients {
    double C;      ///< multiplier of f^{p-2}, (p-1) s_g / a_N at the threshold problem
    double K;      ///< constant part s_g/a_N + lambda
    double lambda; ///< spectral shift
};

LinearCoefficients linear_coefficients(const ProblemDims& dims, double lambda);

/// Largest admissible shift: K < C f(0)^{p-2} is required for the solution to
/// decrease initially.
double lambda_admissible_cap(const ProblemDims& dims, const RadialProfile& profile);

struct StabilityConfig {
    double tol_lambda = 1e-6;
    double tol_alpha = 1e-6;
    /// Bisection horizon = horizon_factor / sqrt(K_min), K_min = s_g/a_N (the
    /// slowest decay over the bracket).
    double horizon_factor = 40.0;
    /// Horizon of the reported trichotomy (classify_at_lambda default). Much
    /// shorter than the bisection horizon: past it, the unavoidable residual
    /// error of any finitely-known threshold value shows up as a spurious
    /// event, and the decreasing-positive case becomes unobservable.
    double figure_horizon_factor = 2.5;
    /// Absolute horizon override; 0 keeps the factor-based defaults.
    double horizon_override = 0.0;
    StepControl ode;
    EventThresholds events;
    int max_bisections = 200;
};

/// Horizon used inside the bisections.
double default_solver_horizon(const ProblemDims& dims, const StabilityConfig& config = {});
/// Horizon used when reporting a trichotomy class for display.
double default_figure_horizon(const ProblemDims& dims, const StabilityConfig& config = {});

/// Classifies the linear stability trajectory at the given shift. horizon = 0
/// selects the figure horizon. Throws CoefficientPreconditionError when the
/// shift is at or above the admissible cap.
TrajectoryClass classify_at_lambda(const RadialProfile& profile, const ProblemDims& dims,
                                   double lambda, double horizon = 0.0,
                                   const StabilityConfig& config = {});

/// Full trajectory at the given shift, for sample dumps.
Trajectory trajectory_at_lambda(const RadialProfile& profile, const ProblemDims& dims,
                                double lambda, double horizon = 0.0,
                                const StabilityConfig& config = {});

/// Converged stability threshold with its bracket.
struct LambdaResult {
    double lambda_mn;   ///< midpoint of the final bracket
    double bracket_lo;  ///< zero-crossing side
    double bracket_hi;  ///< local-minimum side
    int iterations;
    double horizon_used;
    double ground_state_beta;
};

/// Bisection on the trajectory trichotomy: zero crossings raise the lower end,
/// local minima lower the upper end.
LambdaResult find_lambda(const ProblemDims& dims, const RadialProfile& profile,
                         const StabilityConfig& config = {});

/// Closed bracket around a bisection result.
struct Bracket {
    double lo;
    double hi;
    double mid() const { return 0.5 * (lo + hi); }
};

/// Infimum A(lambda) of the shifted Rayleigh quotient, found by bisection on
/// the multiplier alpha in u'' + ((n-1)/t)u' + ((alpha/a_N) f^{p-2} - K) u = 0.
Bracket a_of_lambda_bracket(const RadialProfile& profile, const ProblemDims& dims,
                            double lambda, double tol = 1e-6,
                            const StabilityConfig& config = {});
double a_of_lambda(const RadialProfile& profile, const ProblemDims& dims, double lambda,
                   double tol = 1e-6, const StabilityConfig& config = {});

/// Root of A(lambda) = (p-1) s_g: the second route to the threshold.
double lambda_from_a_curve(const RadialProfile& profile, const ProblemDims& dims,
                           double tol = 1e-6, const StabilityConfig& config = {});

enum class Verdict { Stable, Unstable, Marginal };

struct StabilityReport {
    double lambda_1;
    double lambda_mn;
    Verdict verdict;
    bool yamabe_metric_sufficient; ///< whether m >= lambda(m,n)
    double marginal_band;          ///< half-width of the undecidable strip
};

/// Compares the user-supplied first eigenvalue against the threshold. The
/// equality case cannot be decided numerically, so a band of
/// max(tol_lambda, 1e-4) around the threshold reports Marginal.
StabilityReport stability_verdict(const ProblemDims& dims, double lambda_1,
                                  const LambdaResult& result, double tol_lambda = 1e-6);

} // namespace yamabe
