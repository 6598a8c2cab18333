#include "yamabe/ground_state.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace yamabe {

namespace {

// Odd extension of the power nonlinearity; keeps the right-hand side finite
// when an overshooting trajectory is integrated slightly past its zero.
double signed_power(double u, double q) {
    return u >= 0.0 ? std::pow(u, q) : -std::pow(-u, q);
}

RadialIvp ground_ivp(const ProblemDims& dims, double kappa, double beta, double horizon,
                     const StepControl& control) {
    RadialIvp ivp;
    ivp.n = dims.n;
    const double p = dims.p;
    ivp.force = [kappa, p](double, double u) { return kappa * (signed_power(u, p - 1) - u); };
    ivp.u0 = beta;
    ivp.horizon = horizon;
    ivp.control = control;
    // Quarter-period cap of the fastest local oscillation, so no dip can be
    // stepped over.
    const double omega =
        std::sqrt(kappa * std::max(1.0, (p - 1) * signed_power(beta, p - 2)));
    ivp.control.max_step = std::min(horizon / 100.0, 0.5 / omega);
    return ivp;
}

TrajectoryKind classify_shot(const ProblemDims& dims, double kappa, double beta,
                             double horizon, const StepControl& control, bool raw) {
    EventThresholds events;
    events.raw_events = raw;
    StepControl ctrl = control;
    double T = horizon;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const Trajectory traj = integrate(ground_ivp(dims, kappa, beta, T, ctrl), events);
        const TrajectoryClass cls = classify(traj, events);
        if (cls.kind != TrajectoryKind::Ambiguous) return cls.kind;
        if (raw) return cls.kind;
        if (attempt == 0) {
            ctrl.abs_tol *= 0.1;
            ctrl.rel_tol *= 0.1;
        } else {
            T *= 2.0;
        }
    }
    return TrajectoryKind::Ambiguous;
}

struct BetaBracket {
    double lo; // local-minimum side (beta below critical)
    double hi; // zero-crossing side (beta above critical)
};

BetaBracket bisect_beta(const ProblemDims& dims, double kappa, const ShootConfig& cfg,
                        double horizon) {
    double lo = 1.0 + 1e-3;
    double hi = 2.0;

    const TrajectoryKind lo_kind = classify_shot(dims, kappa, lo, horizon, cfg.ode, false);
    if (lo_kind == TrajectoryKind::ZeroCrossing) {
        throw BracketError("shooting bracket: the lower end f(0) = 1.001 already crosses zero");
    }
    while (classify_shot(dims, kappa, hi, horizon, cfg.ode, false) !=
           TrajectoryKind::ZeroCrossing) {
        hi *= 2.0;
        if (hi > 32768.0) {
            throw BracketError(
                "shooting bracket: no zero-crossing trajectory found with f(0) up to 2^15");
        }
    }

    bool ambiguous_to_hi = true;
    int iterations = 0;
    while (hi - lo > cfg.tol_beta * std::abs(0.5 * (hi + lo))) {
        if (++iterations > cfg.max_bisections) {
            throw ConvergenceError("beta bisection exceeded the iteration cap");
        }
        const double mid = 0.5 * (lo + hi);
        switch (classify_shot(dims, kappa, mid, horizon, cfg.ode, false)) {
            case TrajectoryKind::ZeroCrossing:
                hi = mid;
                break;
            case TrajectoryKind::LocalMin:
            case TrajectoryKind::DecreasingPositive:
                lo = mid;
                break;
            case TrajectoryKind::Ambiguous:
                // Ambiguity concentrates at the critical value; shrinking from
                // alternating sides keeps the bracket valid.
                if (ambiguous_to_hi) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                ambiguous_to_hi = !ambiguous_to_hi;
                break;
        }
    }

    // Polish to machine resolution with raw events. The extra digits are not
    // part of the convergence contract; they extend the range where the
    // forward trajectory tracks the true ground state.
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const TrajectoryKind kind = classify_shot(dims, kappa, mid, horizon, cfg.ode, true);
        if (kind == TrajectoryKind::ZeroCrossing) {
            hi = mid;
        } else if (kind == TrajectoryKind::LocalMin) {
            lo = mid;
        } else {
            break; // indistinguishable from critical at this resolution
        }
    }
    return {lo, hi};
}

// Regular-at-infinity solution of the linearized equation
// g'' + ((n-1)/t) g' = mu^2 g, namely g(t) = t^{1-n/2} K_{n/2-1}(mu t).
double tail_seed_value(int n, double mu, double t) {
    const double nu = 0.5 * n - 1.0;
    return std::pow(t, 1.0 - 0.5 * n) * std::cyl_bessel_k(nu, mu * t);
}

double tail_seed_deriv(int n, double mu, double t) {
    const double nu = 0.5 * n - 1.0;
    const double x = mu * t;
    const double k = std::cyl_bessel_k(nu, x);
    const double kp =
        -0.5 * (std::cyl_bessel_k(std::abs(nu - 1.0), x) + std::cyl_bessel_k(nu + 1.0, x));
    return (1.0 - 0.5 * n) * std::pow(t, -0.5 * n) * k +
           std::pow(t, 1.0 - 0.5 * n) * mu * kp;
}

RadialProfile build_profile(const ProblemDims& dims, double kappa, const ShootConfig& cfg) {
    const double mu = std::sqrt(kappa);
    const double horizon = cfg.horizon_factor / mu;
    const BetaBracket bracket = bisect_beta(dims, kappa, cfg, horizon);
    const double beta = 0.5 * (bracket.lo + bracket.hi);

    const int M = cfg.grid_intervals;
    if (M < 16 || M % 2 != 0) {
        throw DomainError("grid_intervals must be an even number >= 16");
    }
    const double t_grid = cfg.grid_factor / mu;
    const double h = t_grid / M;

    RadialProfile profile;
    profile.dims = dims;
    profile.kappa = kappa;
    profile.beta = beta;
    profile.grid_step = h;
    profile.values.assign(M + 1, 0.0);
    profile.derivs.assign(M + 1, 0.0);
    profile.tail_rate = mu;
    profile.tol_beta = cfg.tol_beta;
    profile.abs_tol = cfg.ode.abs_tol;
    profile.rel_tol = cfg.ode.rel_tol;
    profile.values[0] = beta;
    profile.derivs[0] = 0.0;

    // Forward pass to a mid-grid node. Beyond it the unstable mode seeded by
    // the residual beta error takes over, so the far grid comes from a
    // backward pass instead.
    const int i_switch = std::min(
        M - 1, std::max(1, static_cast<int>(std::ceil(8.0 / (mu * h)))));
    const double t_switch = i_switch * h;

    std::vector<double> nodes;
    nodes.reserve(i_switch);
    for (int i = 1; i <= i_switch; ++i) nodes.push_back(i * h);

    StepControl fine = cfg.ode;
    fine.abs_tol = std::min(cfg.ode.abs_tol, 1e-13 * beta);
    RadialIvp fwd = ground_ivp(dims, kappa, beta, t_switch, fine);
    const Trajectory traj = integrate(fwd, EventThresholds{}, nodes);
    if (traj.stop != StopReason::HorizonReached) {
        throw ConvergenceError("forward ground-state pass deviated before the matching point");
    }
    {
        size_t k = 0;
        for (int i = 1; i <= i_switch; ++i) {
            const double ti = i * h;
            while (k < traj.t.size() && traj.t[k] != ti) ++k;
            if (k == traj.t.size()) {
                throw ConvergenceError("forward pass missed a grid node");
            }
            profile.values[i] = traj.u[k];
            profile.derivs[i] = traj.v[k];
        }
    }
    const double f_switch = profile.values[i_switch];
    const double v_switch = profile.derivs[i_switch];

    // Backward pass from deep inside the linear tail, with the seed amplitude
    // matched to the forward value at the switch node.
    const double t_far = 34.0 / mu;
    const double g_far = tail_seed_value(dims.n, mu, t_far);
    const double gp_far = tail_seed_deriv(dims.n, mu, t_far);

    RadialIvp bwd = ground_ivp(dims, kappa, beta, horizon, cfg.ode);
    bwd.control.max_step = std::min((t_far - t_switch) / 50.0, 0.5 / mu);
    // The tail spans many orders of magnitude and neither component vanishes
    // on it, so the error control must be purely relative.
    bwd.control.abs_tol = 0.0;

    const auto backward_value = [&](double amplitude) {
        const OdeState end = integrate_from(
            bwd, OdeState{t_far, amplitude * g_far, amplitude * gp_far}, t_switch);
        return end;
    };

    // Start from the exactly-linear transfer; the nonlinear term only bends
    // this near the switch node.
    double a0 = f_switch / tail_seed_value(dims.n, mu, t_switch);
    OdeState e0 = backward_value(a0);
    double m0 = e0.u - f_switch;
    double a1 = a0 * (1.0 + 1e-3);
    OdeState e1 = backward_value(a1);
    double m1 = e1.u - f_switch;
    for (int i = 0; i < 60 && std::abs(m1) > 1e-13 * f_switch; ++i) {
        if (m1 == m0) break;
        const double a2 = a1 - m1 * (a1 - a0) / (m1 - m0);
        a0 = a1;
        m0 = m1;
        a1 = a2;
        e1 = backward_value(a1);
        m1 = e1.u - f_switch;
    }
    if (std::abs(m1) > 1e-9 * f_switch) {
        throw ConvergenceError("tail amplitude matching did not converge");
    }
    if (std::abs(e1.v - v_switch) > 1e-4 * std::abs(v_switch)) {
        throw ConvergenceError("tail matching: derivative mismatch at the switch node");
    }

    {
        std::vector<double> down_nodes;
        down_nodes.reserve(M - i_switch);
        for (int i = M; i > i_switch; --i) down_nodes.push_back(i * h);
        integrate_from(bwd, OdeState{t_far, a1 * g_far, a1 * gp_far}, t_switch, down_nodes,
                       [&](double t, double u, double v) {
                           const int i = static_cast<int>(std::llround(t / h));
                           if (i > i_switch && i <= M) {
                               profile.values[i] = u;
                               profile.derivs[i] = v;
                           }
                       });
    }

    // Least-squares amplitude of the tail model over the last tenth of the
    // grid, with the rate pinned to its analytic value.
    {
        const double s = 0.5 * (dims.n - 1);
        double acc = 0.0;
        int count = 0;
        for (int i = M; i >= 0 && i * h >= 0.9 * t_grid; --i) {
            acc += std::log(profile.values[i]) + s * std::log(i * h) + mu * (i * h);
            ++count;
        }
        profile.tail_amplitude = std::exp(acc / count);
    }

    for (int i = 0; i <= M; ++i) {
        if (!(profile.values[i] > 0.0)) {
            throw ConvergenceError("ground-state profile is not strictly positive");
        }
        if (i > 0 && !(profile.values[i] < profile.values[i - 1])) {
            throw ConvergenceError("ground-state profile is not strictly decreasing");
        }
    }
    const double tail_at_grid =
        profile.tail_amplitude * std::pow(t_grid, -0.5 * (dims.n - 1)) * std::exp(-mu * t_grid);
    if (std::abs(tail_at_grid - profile.values.back()) > 0.02 * profile.values.back()) {
        throw ConvergenceError("tail model does not match the grid at its end");
    }
    return profile;
}

} // namespace

double RadialProfile::anchored_amplitude() const {
    const double tg = t_grid();
    const double s = 0.5 * (dims.n - 1);
    return values.back() * std::pow(tg, s) * std::exp(tail_rate * tg);
}

double RadialProfile::eval(double t) const {
    if (t < 0.0) throw DomainError("profile evaluated at negative t");
    const double tg = t_grid();
    if (t >= tg) {
        const double s = 0.5 * (dims.n - 1);
        return anchored_amplitude() * std::pow(t, -s) * std::exp(-tail_rate * t);
    }
    const size_t m = values.size() - 1;
    size_t i = std::min(static_cast<size_t>(t / grid_step), m - 1);
    const double t0 = i * grid_step;
    const double s = (t - t0) / grid_step;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * values[i] + (s3 - 2 * s2 + s) * grid_step * derivs[i] +
           (-2 * s3 + 3 * s2) * values[i + 1] + (s3 - s2) * grid_step * derivs[i + 1];
}

double RadialProfile::eval_deriv(double t) const {
    if (t < 0.0) throw DomainError("profile evaluated at negative t");
    const double tg = t_grid();
    if (t >= tg) {
        const double s = 0.5 * (dims.n - 1);
        return -anchored_amplitude() * std::pow(t, -s) * std::exp(-tail_rate * t) *
               (tail_rate + s / t);
    }
    const size_t m = values.size() - 1;
    size_t i = std::min(static_cast<size_t>(t / grid_step), m - 1);
    const double t0 = i * grid_step;
    const double s = (t - t0) / grid_step;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * values[i] + (3 * s2 - 4 * s + 1) * grid_step * derivs[i] +
            (-6 * s2 + 6 * s) * values[i + 1] + (3 * s2 - 2 * s) * grid_step * derivs[i + 1]) /
           grid_step;
}

RadialProfile shoot_ground_state(const ProblemDims& dims, const ShootConfig& config) {
    return build_profile(dims, dims.kappa(), config);
}

RadialProfile shoot_unit_ground_state(const ProblemDims& dims, const ShootConfig& config) {
    return build_profile(dims, 1.0, config);
}

RadialProfile rescale_normalized(const RadialProfile& w, const ProblemDims& dims) {
    if (w.kappa != 1.0) {
        throw DomainError("rescale_normalized expects a unit-normalized profile");
    }
    if (w.dims.n != dims.n || w.dims.N != dims.N) {
        throw DomainError("rescale_normalized: profile dimensions do not match the target");
    }
    const double mu = dims.decay_rate();
    RadialProfile f = w;
    f.dims = dims;
    f.kappa = dims.kappa();
    f.grid_step = w.grid_step / mu;
    for (double& d : f.derivs) d *= mu;
    f.tail_rate = w.tail_rate * mu;
    f.tail_amplitude = w.tail_amplitude * std::pow(mu, 0.5 * (dims.n - 1));
    return f;
}

namespace {

std::string hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_hex(const std::string& token, const char* field) {
    char* end = nullptr;
    const double x = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw CacheError(std::string("profile file: malformed value for ") + field);
    }
    return x;
}

} // namespace

void save_profile(const RadialProfile& profile, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw CacheError("cannot write profile file " + tmp.string());
        out << "yamabe-profile 1\n";
        out << "m " << profile.dims.m << "\n";
        out << "n " << profile.dims.n << "\n";
        out << "kappa " << hex(profile.kappa) << "\n";
        out << "beta " << hex(profile.beta) << "\n";
        out << "grid_step " << hex(profile.grid_step) << "\n";
        out << "tail_rate " << hex(profile.tail_rate) << "\n";
        out << "tail_amplitude " << hex(profile.tail_amplitude) << "\n";
        out << "tol_beta " << hex(profile.tol_beta) << "\n";
        out << "abs_tol " << hex(profile.abs_tol) << "\n";
        out << "rel_tol " << hex(profile.rel_tol) << "\n";
        out << "nodes " << profile.values.size() << "\n";
        for (size_t i = 0; i < profile.values.size(); ++i) {
            out << hex(profile.values[i]) << " " << hex(profile.derivs[i]) << "\n";
        }
        if (!out) throw CacheError("write failure on " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RadialProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CacheError("cannot open profile file " + path.string());
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "yamabe-profile" || version != 1) {
        throw CacheError("profile file " + path.string() + ": unknown format or version");
    }

    int m = 0, n = 0;
    size_t nodes = 0;
    RadialProfile profile;
    std::string key, value;
    while (in >> key) {
        if (key == "nodes") {
            in >> nodes;
            break;
        }
        if (!(in >> value)) throw CacheError("profile file: truncated header");
        if (key == "m") m = static_cast<int>(parse_hex(value, "m"));
        else if (key == "n") n = static_cast<int>(parse_hex(value, "n"));
        else if (key == "kappa") profile.kappa = parse_hex(value, "kappa");
        else if (key == "beta") profile.beta = parse_hex(value, "beta");
        else if (key == "grid_step") profile.grid_step = parse_hex(value, "grid_step");
        else if (key == "tail_rate") profile.tail_rate = parse_hex(value, "tail_rate");
        else if (key == "tail_amplitude") profile.tail_amplitude = parse_hex(value, "tail_amplitude");
        else if (key == "tol_beta") profile.tol_beta = parse_hex(value, "tol_beta");
        else if (key == "abs_tol") profile.abs_tol = parse_hex(value, "abs_tol");
        else if (key == "rel_tol") profile.rel_tol = parse_hex(value, "rel_tol");
        else throw CacheError("profile file: unknown header key '" + key + "'");
    }
    if (nodes < 2) throw CacheError("profile file: missing or invalid node count");
    profile.dims = make_dims(m, n);
    profile.values.resize(nodes);
    profile.derivs.resize(nodes);
    for (size_t i = 0; i < nodes; ++i) {
        std::string v, d;
        if (!(in >> v >> d)) throw CacheError("profile file: truncated node data");
        profile.values[i] = parse_hex(v, "value");
        profile.derivs[i] = parse_hex(d, "deriv");
        if (!(profile.values[i] > 0.0)) {
            throw CacheError("profile file: non-positive sample");
        }
    }
    if (!(profile.grid_step > 0.0) || !(profile.beta > 1.0) || !(profile.tail_rate > 0.0)) {
        throw CacheError("profile file: invalid header fields");
    }
    return profile;
}

} // namespace yamabe
