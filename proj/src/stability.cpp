#include "yamabe/stability.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace yamabe {

namespace {

RadialIvp linear_ivp(const RadialProfile& profile, const ProblemDims& dims, double coeff_c,
                     double coeff_k, double horizon, const StepControl& control) {
    RadialIvp ivp;
    ivp.n = dims.n;
    const double pm2 = dims.p - 2.0;
    const RadialProfile* f = &profile;
    ivp.force = [f, pm2, coeff_c, coeff_k](double t, double u) {
        return (coeff_c * std::pow(f->eval(t), pm2) - coeff_k) * u;
    };
    ivp.u0 = 1.0;
    ivp.horizon = horizon;
    ivp.control = control;
    const double omega = std::sqrt(coeff_c * std::pow(profile.beta, pm2) + coeff_k);
    ivp.control.max_step = std::min(horizon / 100.0, 0.5 / omega);
    return ivp;
}

TrajectoryClass classify_linear(const RadialProfile& profile, const ProblemDims& dims,
                                double coeff_c, double coeff_k, double horizon,
                                const StabilityConfig& config) {
    const Trajectory traj =
        integrate(linear_ivp(profile, dims, coeff_c, coeff_k, horizon, config.ode),
                  config.events);
    return classify(traj, config.events);
}

// Classification with the spec'd ambiguity fallback: one horizon doubling.
TrajectoryClass classify_with_retry(const RadialProfile& profile, const ProblemDims& dims,
                                    double coeff_c, double coeff_k, double horizon,
                                    const StabilityConfig& config) {
    TrajectoryClass cls = classify_linear(profile, dims, coeff_c, coeff_k, horizon, config);
    if (cls.kind == TrajectoryKind::Ambiguous) {
        cls = classify_linear(profile, dims, coeff_c, coeff_k, 2.0 * horizon, config);
    }
    return cls;
}

} // namespace

LinearCoefficients linear_coefficients(const ProblemDims& dims, double lambda) {
    return {(dims.p - 1.0) * dims.s_g / dims.a_N, dims.s_g / dims.a_N + lambda, lambda};
}

double lambda_admissible_cap(const ProblemDims& dims, const RadialProfile& profile) {
    const double c = (dims.p - 1.0) * dims.s_g / dims.a_N;
    return c * std::pow(profile.beta, dims.p - 2.0) - dims.s_g / dims.a_N;
}

double default_solver_horizon(const ProblemDims& dims, const StabilityConfig& config) {
    if (config.horizon_override > 0.0) return config.horizon_override;
    return config.horizon_factor / dims.decay_rate();
}

double default_figure_horizon(const ProblemDims& dims, const StabilityConfig& config) {
    if (config.horizon_override > 0.0) return config.horizon_override;
    return config.figure_horizon_factor / dims.decay_rate();
}

Trajectory trajectory_at_lambda(const RadialProfile& profile, const ProblemDims& dims,
                                double lambda, double horizon,
                                const StabilityConfig& config) {
    if (lambda < 0.0) throw DomainError("the spectral shift must be nonnegative");
    const LinearCoefficients lc = linear_coefficients(dims, lambda);
    const double cap = lambda_admissible_cap(dims, profile);
    if (lambda >= cap) {
        throw CoefficientPreconditionError(
            "shift " + std::to_string(lambda) +
                " is outside the admissible range [0, " + std::to_string(cap) +
                "): the trajectory would not decrease initially",
            cap);
    }
    const double T = horizon > 0.0 ? horizon : default_figure_horizon(dims, config);
    return integrate(linear_ivp(profile, dims, lc.C, lc.K, T, config.ode), config.events);
}

TrajectoryClass classify_at_lambda(const RadialProfile& profile, const ProblemDims& dims,
                                   double lambda, double horizon,
                                   const StabilityConfig& config) {
    const Trajectory traj = trajectory_at_lambda(profile, dims, lambda, horizon, config);
    return classify(traj, config.events);
}

LambdaResult find_lambda(const ProblemDims& dims, const RadialProfile& profile,
                         const StabilityConfig& config) {
    const double cap = lambda_admissible_cap(dims, profile);
    const double horizon = default_solver_horizon(dims, config);
    const LinearCoefficients base = linear_coefficients(dims, 0.0);

    const auto probe = [&](double lambda) {
        return classify_with_retry(profile, dims, base.C, base.K + lambda, horizon, config)
            .kind;
    };

    double lo = 0.0;
    double hi = cap * (1.0 - 1e-9);
    int iterations = 0;

    const TrajectoryKind at_zero = probe(lo);
    ++iterations;
    if (at_zero != TrajectoryKind::ZeroCrossing) {
        throw BracketError(
            "threshold bracket: the trajectory at lambda = 0 does not cross zero");
    }
    const TrajectoryKind at_cap = probe(hi);
    ++iterations;
    if (at_cap != TrajectoryKind::LocalMin) {
        throw BracketError(
            "threshold bracket: no local-minimum trajectory below the admissible cap");
    }

    bool ambiguous_to_hi = true;
    while (hi - lo > config.tol_lambda) {
        if (++iterations > config.max_bisections) {
            throw ConvergenceError("threshold bisection exceeded the iteration cap");
        }
        const double mid = 0.5 * (lo + hi);
        switch (probe(mid)) {
            case TrajectoryKind::ZeroCrossing:
                lo = mid;
                break;
            case TrajectoryKind::LocalMin:
                hi = mid;
                break;
            case TrajectoryKind::DecreasingPositive:
            case TrajectoryKind::Ambiguous:
                // Only occurs within the resolution limit of the root itself;
                // shrinking alternating sides keeps the bracket valid.
                if (ambiguous_to_hi) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                ambiguous_to_hi = !ambiguous_to_hi;
                break;
        }
    }

    LambdaResult result;
    result.lambda_mn = 0.5 * (lo + hi);
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    result.iterations = iterations;
    result.horizon_used = horizon;
    result.ground_state_beta = profile.beta;
    return result;
}

Bracket a_of_lambda_bracket(const RadialProfile& profile, const ProblemDims& dims,
                            double lambda, double tol, const StabilityConfig& config) {
    if (lambda < 0.0) throw DomainError("the spectral shift must be nonnegative");
    const double horizon = default_solver_horizon(dims, config);
    const double k = dims.s_g / dims.a_N + lambda;
    const double beta_pm2 = std::pow(profile.beta, dims.p - 2.0);
    // Trajectories with alpha below this never decrease initially; they sit on
    // the below-critical side without integration.
    const double alpha_decrease = dims.a_N * k / beta_pm2;

    const auto probe = [&](double alpha) {
        if (alpha <= alpha_decrease) return TrajectoryKind::LocalMin;
        return classify_with_retry(profile, dims, alpha / dims.a_N, k, horizon, config).kind;
    };

    // Analytic lower bound s_g f(0)^{2-p} for the infimum.
    double lo = dims.s_g / beta_pm2;
    double hi = std::max(2.0 * alpha_decrease, 2.0 * lo);
    int expansions = 0;
    while (probe(hi) != TrajectoryKind::ZeroCrossing) {
        hi *= 2.0;
        if (++expansions > 60) {
            throw BracketError("quotient bracket: no zero-crossing multiplier found");
        }
    }
    if (probe(lo) == TrajectoryKind::ZeroCrossing) {
        throw BracketError("quotient bracket: the analytic lower bound already crosses");
    }

    int iterations = 0;
    bool ambiguous_to_hi = true;
    while (hi - lo > tol) {
        if (++iterations > config.max_bisections) {
            throw ConvergenceError("quotient bisection exceeded the iteration cap");
        }
        const double mid = 0.5 * (lo + hi);
        switch (probe(mid)) {
            case TrajectoryKind::ZeroCrossing:
                hi = mid;
                break;
            case TrajectoryKind::LocalMin:
                lo = mid;
                break;
            case TrajectoryKind::DecreasingPositive:
            case TrajectoryKind::Ambiguous:
                if (ambiguous_to_hi) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                ambiguous_to_hi = !ambiguous_to_hi;
                break;
        }
    }
    return {lo, hi};
}

double a_of_lambda(const RadialProfile& profile, const ProblemDims& dims, double lambda,
                   double tol, const StabilityConfig& config) {
    return a_of_lambda_bracket(profile, dims, lambda, tol, config).mid();
}

double lambda_from_a_curve(const RadialProfile& profile, const ProblemDims& dims, double tol,
                           const StabilityConfig& config) {
    const double target = (dims.p - 1.0) * dims.s_g;
    const double alpha_tol = std::min(tol, config.tol_alpha);
    const auto g = [&](double lambda) {
        return a_of_lambda(profile, dims, lambda, alpha_tol, config) - target;
    };

    double lo = 0.0;
    double hi = lambda_admissible_cap(dims, profile) * (1.0 - 1e-9);
    double g_lo = g(lo);
    if (g_lo >= 0.0) {
        throw BracketError("quotient-curve root: A(0) is not below the critical level");
    }
    if (g(hi) <= 0.0) {
        throw BracketError("quotient-curve root: A stays below the critical level");
    }
    for (int i = 0; i < config.max_bisections && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StabilityReport stability_verdict(const ProblemDims& dims, double lambda_1,
                                  const LambdaResult& result, double tol_lambda) {
    if (!(lambda_1 > 0.0)) {
        throw DomainError("the first eigenvalue lambda_1 must be positive");
    }
    const double band = std::max(tol_lambda, 1e-4);
    StabilityReport report;
    report.lambda_1 = lambda_1;
    report.lambda_mn = result.lambda_mn;
    report.marginal_band = band;
    if (lambda_1 >= result.lambda_mn + band) {
        report.verdict = Verdict::Stable;
    } else if (lambda_1 <= result.lambda_mn - band) {
        report.verdict = Verdict::Unstable;
    } else {
        report.verdict = Verdict::Marginal;
    }
    report.yamabe_metric_sufficient = dims.m >= result.lambda_mn;
    return report;
}

} // namespace yamabe
