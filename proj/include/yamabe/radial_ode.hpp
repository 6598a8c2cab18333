#pragma once

#include <functional>
#include <span>
#include <vector>

namespace yamabe {

/// Step-size control for the embedded Dormand-Prince 5(4) pair.
struct StepControl {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.0;            ///< 0 = span/100
    double initial_step = 0.0;        ///< 0 = the Taylor start step
    double taylor_step_factor = 1e-6; ///< start step h0 = factor * horizon
    double min_step_factor = 1e-14;   ///< underflow floor = factor * span
    double event_refine_tol = 1e-10;  ///< bisection tolerance for event times
};

/// Thresholds separating the three trajectory classes.
struct EventThresholds {
    double eps_zero = 1e-12;   ///< u must dip below -eps_zero to count as a crossing
    double eps_min_rel = 1e-8; ///< minima with u <= eps_min_rel * u(0) stay unclassified
    /// Internal refinement mode: any derivative sign flip counts as a minimum
    /// regardless of magnitude. Used to polish shooting brackets past the
    /// resolution where the thresholded classes go ambiguous.
    bool raw_events = false;
};

/// Radial initial-value problem
///     u''(t) + ((n-1)/t) u'(t) + F(t, u) = 0,   u(0) = u0,  u'(0) = 0,
/// integrated on [0, horizon]. Linear problems use F(t, u) = q(t) * u; the
/// ground-state equation supplies the full nonlinear term.
struct RadialIvp {
    int n = 2;                                  ///< Euclidean dimension fixing the (n-1)/t drift
    std::function<double(double, double)> force; ///< F(t, u)
    double u0 = 1.0;
    double horizon = 1.0;
    StepControl control;
};

/// State after the Taylor step off the coordinate singularity.
struct TaylorStart {
    double t1;
    double u1;
    double v1;
};

/// Second-order expansion around the regular origin: u''(0) = -F(0, u0)/n,
/// u(h0) = u0 + u''(0) h0^2/2, u'(h0) = u''(0) h0.
TaylorStart taylor_start(const RadialIvp& ivp, double h0);

enum class StopReason {
    HorizonReached,
    ZeroCrossing,
    LocalMin,
    StepUnderflow,
};

/// One integration run: accepted nodes with value, first and second derivative,
/// plus the event that ended it (if any).
struct Trajectory {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> v; ///< u'
    std::vector<double> a; ///< u'' from the right-hand side

    StopReason stop = StopReason::HorizonReached;
    double event_time = 0.0;  ///< refined crossing / minimum location
    double event_value = 0.0; ///< u at the event
    /// LocalMin stops with the minimum at u <= eps_min carry this flag; the
    /// classifier maps them to Ambiguous.
    bool event_below_threshold = false;
    double u0 = 1.0;

    /// Cubic Hermite interpolation on the accepted nodes.
    double eval(double time) const;
    double eval_deriv(double time) const;
};

/// Integrates from the Taylor start until the horizon or the first event.
/// forced_nodes (strictly increasing, all > the Taylor step) are landed on
/// exactly and recorded as nodes.
Trajectory integrate(const RadialIvp& ivp, const EventThresholds& events = {},
                     std::span<const double> forced_nodes = {});

/// Interior state of the radial equation, for continuations that do not start
/// at the origin.
struct OdeState {
    double t;
    double u;
    double v;
};

/// Advances the same equation from an arbitrary interior state to t_end; the
/// direction may be decreasing (used by the tail-matched profile build). No
/// event handling. forced_nodes must be monotone in the travel direction and
/// are reported through sink, as is the final state.
OdeState integrate_from(const RadialIvp& ivp, OdeState start, double t_end,
                        std::span<const double> forced_nodes = {},
                        const std::function<void(double, double, double)>& sink = {});

enum class TrajectoryKind {
    ZeroCrossing,
    LocalMin,
    DecreasingPositive,
    Ambiguous,
};

/// Three-way split of a trajectory, with Ambiguous flagging runs the horizon
/// could not separate.
struct TrajectoryClass {
    TrajectoryKind kind;
    double t_event = 0.0;
    double u_event = 0.0;
};

/// Maps a finished trajectory onto the trichotomy. Requires the initial
/// decrease condition (u''(0) <= 0); throws DomainError otherwise.
TrajectoryClass classify(const Trajectory& traj, const EventThresholds& events = {});

} // namespace yamabe
