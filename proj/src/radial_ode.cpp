#include "yamabe/radial_ode.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace yamabe {

namespace {

// Dormand-Prince 5(4) tableau. e_i = b_i - bhat_i gives the embedded error
// weights directly.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

struct Deriv {
    double du;
    double dv;
};

struct RadialSystem {
    int n;
    const std::function<double(double, double)>* force;

    Deriv operator()(double t, double u, double v) const {
        return {v, -(static_cast<double>(n - 1) / t) * v - (*force)(t, u)};
    }
};

double hermite_value(double t0, double y0, double d0, double t1, double y1, double d1,
                     double x) {
    const double h = t1 - t0;
    const double s = (x - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
           (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

double hermite_deriv(double t0, double y0, double d0, double t1, double y1, double d1,
                     double x) {
    const double h = t1 - t0;
    const double s = (x - t0) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 +
            (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * d1) /
           h;
}

// Bisection for a sign change of the Hermite interpolant on [ta, tb].
double refine_root(double t0, double y0, double d0, double t1, double y1, double d1,
                   double ta, double fa, double tb, double tol) {
    for (int i = 0; i < 200 && tb - ta > tol; ++i) {
        const double tm = 0.5 * (ta + tb);
        const double fm = hermite_value(t0, y0, d0, t1, y1, d1, tm);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            ta = tm;
            fa = fm;
        } else {
            tb = tm;
        }
    }
    return 0.5 * (ta + tb);
}

class Dopri5 {
  public:
    Dopri5(const RadialSystem& sys, const StepControl& ctrl, double span, double dir,
           double initial_step)
        : sys_(sys), ctrl_(ctrl), dir_(dir) {
        max_step_ = ctrl.max_step > 0 ? ctrl.max_step : span / 100.0;
        min_step_ = std::max(span * ctrl.min_step_factor, 1e-300);
        h_ = std::min(initial_step, max_step_);
    }

    void init(double t, double u, double v) {
        t_ = t;
        u_ = u;
        v_ = v;
        k1_ = sys_(t, u, v);
    }

    double t() const { return t_; }
    double u() const { return u_; }
    double v() const { return v_; }
    double a() const { return k1_.dv; }

    double prev_t() const { return pt_; }
    double prev_u() const { return pu_; }
    double prev_v() const { return pv_; }
    double prev_a() const { return pa_; }

    // One accepted step toward target (landing on it exactly when reached).
    // Returns false when the controller drives the step below the floor.
    bool advance(double target) {
        for (int attempt = 0; attempt < 400; ++attempt) {
            double h = std::min(h_, max_step_);
            const double remaining = dir_ * (target - t_);
            const bool clipped = h >= remaining;
            if (clipped) h = remaining;
            const double hs = dir_ * h;

            const double t0 = t_, u0 = u_, v0 = v_;
            const Deriv k1 = k1_;
            const Deriv k2 = sys_(t0 + kC2 * hs, u0 + hs * kA21 * k1.du, v0 + hs * kA21 * k1.dv);
            const Deriv k3 = sys_(t0 + kC3 * hs, u0 + hs * (kA31 * k1.du + kA32 * k2.du),
                                  v0 + hs * (kA31 * k1.dv + kA32 * k2.dv));
            const Deriv k4 =
                sys_(t0 + kC4 * hs, u0 + hs * (kA41 * k1.du + kA42 * k2.du + kA43 * k3.du),
                     v0 + hs * (kA41 * k1.dv + kA42 * k2.dv + kA43 * k3.dv));
            const Deriv k5 = sys_(
                t0 + kC5 * hs,
                u0 + hs * (kA51 * k1.du + kA52 * k2.du + kA53 * k3.du + kA54 * k4.du),
                v0 + hs * (kA51 * k1.dv + kA52 * k2.dv + kA53 * k3.dv + kA54 * k4.dv));
            const Deriv k6 =
                sys_(t0 + hs,
                     u0 + hs * (kA61 * k1.du + kA62 * k2.du + kA63 * k3.du + kA64 * k4.du +
                                kA65 * k5.du),
                     v0 + hs * (kA61 * k1.dv + kA62 * k2.dv + kA63 * k3.dv + kA64 * k4.dv +
                                kA65 * k5.dv));
            const double u1 =
                u0 + hs * (kB1 * k1.du + kB3 * k3.du + kB4 * k4.du + kB5 * k5.du + kB6 * k6.du);
            const double v1 =
                v0 + hs * (kB1 * k1.dv + kB3 * k3.dv + kB4 * k4.dv + kB5 * k5.dv + kB6 * k6.dv);
            const double t1 = clipped ? target : t0 + hs;
            const Deriv k7 = sys_(t1, u1, v1);

            const double eu = hs * (kE1 * k1.du + kE3 * k3.du + kE4 * k4.du + kE5 * k5.du +
                                    kE6 * k6.du + kE7 * k7.du);
            const double ev = hs * (kE1 * k1.dv + kE3 * k3.dv + kE4 * k4.dv + kE5 * k5.dv +
                                    kE6 * k6.dv + kE7 * k7.dv);
            const double su = ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(u0), std::abs(u1));
            const double sv = ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(v0), std::abs(v1));
            double err = std::sqrt(0.5 * ((eu / su) * (eu / su) + (ev / sv) * (ev / sv)));
            if (!std::isfinite(err) || !std::isfinite(u1) || !std::isfinite(v1)) {
                err = 1e10;
            }

            if (err <= 1.0) {
                pt_ = t0;
                pu_ = u0;
                pv_ = v0;
                pa_ = k1.dv;
                t_ = t1;
                u_ = u1;
                v_ = v1;
                k1_ = k7;
                if (!clipped) {
                    const double fac =
                        std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
                    h_ = std::min(h * fac, max_step_);
                }
                return true;
            }
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
            h_ = h * fac;
            if (h_ < min_step_) return false;
        }
        return false;
    }

  private:
    RadialSystem sys_;
    StepControl ctrl_;
    double dir_;
    double max_step_;
    double min_step_;
    double h_;
    double t_ = 0, u_ = 0, v_ = 0;
    double pt_ = 0, pu_ = 0, pv_ = 0, pa_ = 0;
    Deriv k1_{0, 0};
};

void check_ivp(const RadialIvp& ivp) {
    if (ivp.n < 2) throw DomainError("radial IVP requires n >= 2");
    if (!(ivp.horizon > 0) || !std::isfinite(ivp.horizon))
        throw DomainError("radial IVP requires a positive finite horizon");
    if (!ivp.force) throw DomainError("radial IVP has no coefficient function");
}

} // namespace

TaylorStart taylor_start(const RadialIvp& ivp, double h0) {
    if (!(h0 > 0)) throw DomainError("Taylor start step must be positive");
    // L'Hopital across the (n-1)/t drift at the regular origin:
    // n u''(0) + F(0, u0) = 0.
    const double upp0 = -ivp.force(0.0, ivp.u0) / ivp.n;
    return {h0, ivp.u0 + 0.5 * upp0 * h0 * h0, upp0 * h0};
}

double Trajectory::eval(double time) const {
    if (t.empty()) throw DomainError("empty trajectory");
    if (time <= t.front()) return u.front();
    if (time >= t.back()) return u.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t i = static_cast<size_t>(it - t.begin());
    return hermite_value(t[i - 1], u[i - 1], v[i - 1], t[i], u[i], v[i], time);
}

double Trajectory::eval_deriv(double time) const {
    if (t.empty()) throw DomainError("empty trajectory");
    if (time <= t.front()) return v.front();
    if (time >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t i = static_cast<size_t>(it - t.begin());
    return hermite_value(t[i - 1], v[i - 1], a[i - 1], t[i], v[i], a[i], time);
}

Trajectory integrate(const RadialIvp& ivp, const EventThresholds& events,
                     std::span<const double> forced_nodes) {
    check_ivp(ivp);
    const double T = ivp.horizon;
    const double h0 = ivp.control.taylor_step_factor * T;
    const TaylorStart ts = taylor_start(ivp, h0);
    for (size_t i = 0; i < forced_nodes.size(); ++i) {
        if (!(forced_nodes[i] > ts.t1) || !(forced_nodes[i] <= T) ||
            (i > 0 && !(forced_nodes[i] > forced_nodes[i - 1]))) {
            throw DomainError("forced nodes must be strictly increasing in (h0, horizon]");
        }
    }

    Trajectory traj;
    traj.u0 = ivp.u0;
    traj.t.reserve(2048);
    traj.u.reserve(2048);
    traj.v.reserve(2048);
    traj.a.reserve(2048);

    RadialSystem sys{ivp.n, &ivp.force};
    const double h_init = ivp.control.initial_step > 0 ? ivp.control.initial_step : ts.t1;
    Dopri5 st(sys, ivp.control, T, +1.0, h_init);
    st.init(ts.t1, ts.u1, ts.v1);
    traj.t.push_back(ts.t1);
    traj.u.push_back(ts.u1);
    traj.v.push_back(ts.v1);
    traj.a.push_back(st.a());

    const double eps_min = events.eps_min_rel * std::abs(ivp.u0);
    size_t next_forced = 0;
    const double refine_tol = ivp.control.event_refine_tol;

    while (st.t() < T) {
        double target = T;
        if (next_forced < forced_nodes.size()) target = forced_nodes[next_forced];
        if (!st.advance(target)) {
            traj.stop = StopReason::StepUnderflow;
            return traj;
        }
        if (next_forced < forced_nodes.size() && st.t() == forced_nodes[next_forced]) {
            ++next_forced;
        }

        // Zero crossing: the dip below -eps_zero is the trigger; the crossing
        // time is refined on the interpolant.
        if (st.u() < -events.eps_zero) {
            double t_zero = st.prev_t();
            if (st.prev_u() > 0.0) {
                t_zero = refine_root(st.prev_t(), st.prev_u(), st.prev_v(), st.t(), st.u(),
                                     st.v(), st.prev_t(), st.prev_u(), st.t(), refine_tol);
                const double v_zero = hermite_deriv(st.prev_t(), st.prev_u(), st.prev_v(),
                                                    st.t(), st.u(), st.v(), t_zero);
                const double a_zero = hermite_value(st.prev_t(), st.prev_v(), st.prev_a(),
                                                    st.t(), st.v(), st.a(), t_zero);
                traj.t.push_back(t_zero);
                traj.u.push_back(0.0);
                traj.v.push_back(v_zero);
                traj.a.push_back(a_zero);
            }
            traj.t.push_back(st.t());
            traj.u.push_back(st.u());
            traj.v.push_back(st.v());
            traj.a.push_back(st.a());
            traj.stop = StopReason::ZeroCrossing;
            traj.event_time = t_zero;
            traj.event_value = 0.0;
            return traj;
        }

        // Derivative sign flip from negative to positive: a local minimum.
        if (st.prev_v() < 0.0 && st.v() >= 0.0) {
            const double tau =
                st.v() == 0.0
                    ? st.t()
                    : refine_root(st.prev_t(), st.prev_v(), st.prev_a(), st.t(), st.v(), st.a(),
                                  st.prev_t(), st.prev_v(), st.t(), refine_tol);
            const double u_min = hermite_value(st.prev_t(), st.prev_u(), st.prev_v(), st.t(),
                                               st.u(), st.v(), tau);
            const double a_min = hermite_value(st.prev_t(), st.prev_v(), st.prev_a(), st.t(),
                                               st.v(), st.a(), tau);
            traj.t.push_back(tau);
            traj.u.push_back(u_min);
            traj.v.push_back(0.0);
            traj.a.push_back(a_min);
            traj.stop = StopReason::LocalMin;
            traj.event_time = tau;
            traj.event_value = u_min;
            traj.event_below_threshold = !events.raw_events && u_min <= eps_min;
            return traj;
        }

        traj.t.push_back(st.t());
        traj.u.push_back(st.u());
        traj.v.push_back(st.v());
        traj.a.push_back(st.a());
    }
    traj.stop = StopReason::HorizonReached;
    return traj;
}

OdeState integrate_from(const RadialIvp& ivp, OdeState start, double t_end,
                        std::span<const double> forced_nodes,
                        const std::function<void(double, double, double)>& sink) {
    check_ivp(ivp);
    if (!(start.t > 0) || !(t_end > 0)) {
        throw DomainError("interior integration requires strictly positive times");
    }
    const double dir = t_end >= start.t ? +1.0 : -1.0;
    const double span = std::abs(t_end - start.t);
    if (span == 0.0) return start;
    for (size_t i = 0; i < forced_nodes.size(); ++i) {
        const bool inside = dir * (forced_nodes[i] - start.t) > 0 &&
                            dir * (t_end - forced_nodes[i]) >= 0;
        const bool ordered = i == 0 || dir * (forced_nodes[i] - forced_nodes[i - 1]) > 0;
        if (!inside || !ordered) {
            throw DomainError("forced nodes must be monotone between start and t_end");
        }
    }

    RadialSystem sys{ivp.n, &ivp.force};
    const double h_init =
        ivp.control.initial_step > 0 ? ivp.control.initial_step : span * 1e-3;
    Dopri5 st(sys, ivp.control, span, dir, h_init);
    st.init(start.t, start.u, start.v);

    size_t next_forced = 0;
    while (dir * (t_end - st.t()) > 0) {
        double target = t_end;
        if (next_forced < forced_nodes.size()) target = forced_nodes[next_forced];
        if (!st.advance(target)) {
            throw ConvergenceError("step underflow at t = " + std::to_string(st.t()));
        }
        if (next_forced < forced_nodes.size() && st.t() == forced_nodes[next_forced]) {
            ++next_forced;
            if (sink) sink(st.t(), st.u(), st.v());
        }
    }
    if (sink) sink(st.t(), st.u(), st.v());
    return {st.t(), st.u(), st.v()};
}

TrajectoryClass classify(const Trajectory& traj, const EventThresholds& events) {
    if (traj.t.empty()) throw DomainError("cannot classify an empty trajectory");
    if (traj.v.front() > 0.0) {
        throw DomainError("trajectory does not satisfy the initial decrease condition");
    }
    switch (traj.stop) {
        case StopReason::ZeroCrossing:
            return {TrajectoryKind::ZeroCrossing, traj.event_time, traj.event_value};
        case StopReason::LocalMin:
            if (traj.event_below_threshold) {
                return {TrajectoryKind::Ambiguous, traj.event_time, traj.event_value};
            }
            return {TrajectoryKind::LocalMin, traj.event_time, traj.event_value};
        case StopReason::StepUnderflow:
            throw ConvergenceError("integration step underflow at t = " +
                                   std::to_string(traj.t.back()));
        case StopReason::HorizonReached:
            break;
    }
    const double eps_min = events.eps_min_rel * std::abs(traj.u0);
    const double u_end = traj.u.back();
    if (u_end > eps_min) {
        return {TrajectoryKind::DecreasingPositive, traj.t.back(), u_end};
    }
    // Decayed below the minimum-resolution threshold before the horizon: the
    // run cannot separate case (a) from a late crossing or minimum.
    return {TrajectoryKind::Ambiguous, traj.t.back(), u_end};
}

} // namespace yamabe
