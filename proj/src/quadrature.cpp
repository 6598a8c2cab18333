#include "yamabe/quadrature.hpp"

#include "yamabe/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace yamabe {

double sphere_surface(int n) {
    if (n < 1) throw DomainError("sphere_surface requires n >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double upper_incomplete_gamma(double s, double x) {
    if (!(x > 0.0)) throw DomainError("upper_incomplete_gamma requires x > 0");
    // Lentz continued fraction for x > s + 1.
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int i = 1; i <= 300; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + s * std::log(x)) * f;
}

Integrand Integrand::power(double f_power, double t_power) {
    Integrand g;
    g.kind_ = Kind::Power;
    g.f_power_ = f_power;
    g.t_power_ = t_power;
    return g;
}

Integrand Integrand::grad_squared() {
    Integrand g;
    g.kind_ = Kind::GradSquared;
    return g;
}

Integrand Integrand::custom(std::function<double(double, double, double)> fn) {
    Integrand g;
    g.kind_ = Kind::Custom;
    g.fn_ = std::move(fn);
    return g;
}

double Integrand::operator()(double f, double fp, double t) const {
    switch (kind_) {
        case Kind::Power:
            return std::pow(f, f_power_) * (t_power_ == 0.0 ? 1.0 : std::pow(t, t_power_));
        case Kind::GradSquared:
            return fp * fp;
        case Kind::Custom:
            return fn_(f, fp, t);
    }
    return 0.0;
}

namespace {

// Int_T^inf t^nu e^{-r t} dt = Gamma(nu+1, rT) / r^{nu+1}.
double exponential_moment(double nu, double rate, double from) {
    return upper_incomplete_gamma(nu + 1.0, rate * from) / std::pow(rate, nu + 1.0);
}

// Tail of the radial integral under the anchored model
// f(t) = A t^{-s} e^{-mu t}, s = (n-1)/2.
double tail_integral(const RadialProfile& profile, const Integrand& g) {
    const int n = profile.dims.n;
    const double s = 0.5 * (n - 1);
    const double mu = profile.tail_rate;
    const double A = profile.anchored_amplitude();
    const double T = profile.t_grid();

    switch (g.kind()) {
        case Integrand::Kind::Power: {
            const double a = g.f_power();
            if (!(a > 0.0)) {
                throw TailDivergenceError(
                    "radial integrand with non-positive profile power does not decay");
            }
            const double nu = (n - 1) + g.t_power() - a * s;
            return std::pow(A, a) * exponential_moment(nu, a * mu, T);
        }
        case Integrand::Kind::GradSquared: {
            // f' = -A t^{-s} e^{-mu t} (mu + s/t); the square splits into
            // three exponential moments.
            const double A2 = A * A;
            const double base = (n - 1) - 2.0 * s;
            return A2 * (mu * mu * exponential_moment(base, 2.0 * mu, T) +
                         2.0 * mu * s * exponential_moment(base - 1.0, 2.0 * mu, T) +
                         s * s * exponential_moment(base - 2.0, 2.0 * mu, T));
        }
        case Integrand::Kind::Custom:
            break;
    }

    // Adaptive Simpson on the tail model for custom integrands, over a window
    // after which the model is far below every tolerance in play.
    const auto h = [&](double t) {
        const double f = A * std::pow(t, -s) * std::exp(-mu * t);
        const double fp = -f * (mu + s / t);
        return g(f, fp, t) * std::pow(t, n - 1);
    };
    const double t_end = T + 60.0 / mu;
    if (std::abs(h(t_end)) > std::abs(h(T)) && std::abs(h(T)) > 0.0) {
        throw TailDivergenceError("custom radial integrand grows under the tail model");
    }
    struct Simpson {
        const std::function<double(double)>& fn;
        double recurse(double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = fn(lm), frm = fn(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const std::function<double(double)> fn = h;
    const double fa = fn(T), fb = fn(t_end), fm = fn(0.5 * (T + t_end));
    const double whole = (t_end - T) / 6.0 * (fa + 4.0 * fm + fb);
    return Simpson{fn}.recurse(T, t_end, fa, fm, fb, whole, 1e-12, 48);
}

} // namespace

double radial_integral(const RadialProfile& profile, const Integrand& g) {
    const size_t m = profile.values.size() - 1;
    if (m % 2 != 0) throw DomainError("radial_integral requires an even interval count");
    const int n = profile.dims.n;
    const double h = profile.grid_step;

    // Composite Simpson over the uniform grid; the integrand vanishes at t=0
    // through the t^{n-1} factor.
    const auto node = [&](size_t i) {
        const double t = i * h;
        const double w = i == 0 ? 0.0 : std::pow(t, n - 1);
        return g(profile.values[i], profile.derivs[i], t) * w;
    };
    double acc = node(0) + node(m);
    for (size_t i = 1; i < m; i += 2) acc += 4.0 * node(i);
    for (size_t i = 2; i < m; i += 2) acc += 2.0 * node(i);
    const double grid_part = acc * h / 3.0;

    return sphere_surface(n) * (grid_part + tail_integral(profile, g));
}

IntegralReport ground_state_report(const RadialProfile& profile) {
    const ProblemDims& d = profile.dims;
    IntegralReport r;
    r.sphere_factor = sphere_surface(d.n);
    r.l2_sq = radial_integral(profile, Integrand::power(2.0));
    r.lp_p = radial_integral(profile, Integrand::power(d.p));
    r.grad_sq = radial_integral(profile, Integrand::grad_squared());

    const auto residual = [](double lhs, double rhs) {
        return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
    };
    r.virial_grad_l2 = residual(d.a_N * d.m * r.grad_sq, d.n * d.s_g * r.l2_sq);
    r.virial_grad_lp = residual(d.N * d.a_N * r.grad_sq, d.n * d.s_g * r.lp_p);
    r.virial_l2_lp = residual(d.N * r.l2_sq, d.m * r.lp_p);
    return r;
}

double gn_best_constant(const RadialProfile& w, const ProblemDims& dims) {
    const double l2_sq = radial_integral(w, Integrand::power(2.0));
    const double lp_p = radial_integral(w, Integrand::power(dims.p));
    const double grad_sq = radial_integral(w, Integrand::grad_squared());
    const double lp_sq = std::pow(lp_p, 2.0 / dims.p);
    return lp_sq / (std::pow(grad_sq, static_cast<double>(dims.n) / dims.N) *
                    std::pow(l2_sq, static_cast<double>(dims.m) / dims.N));
}

double yamabe_constant_rn(const RadialProfile& profile, const ProblemDims& dims,
                          double vol_M) {
    if (!(vol_M > 0.0)) {
        throw DomainError("yamabe_constant_rn requires a positive closed-factor volume");
    }
    // The conformal volume element is f^{(p-2)N/2} = f^p, so the conformal
    // volume is vol_M * ||f||_p^p.
    const double lp_p = radial_integral(profile, Integrand::power(dims.p));
    return dims.s_g * std::pow(vol_M * lp_p, 2.0 / dims.N);
}

} // namespace yamabe
