#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "yamabe/errors.hpp"
#include "yamabe/stability.hpp"

#include <cmath>
#include <vector>

using namespace yamabe;

namespace {

const RadialProfile& ground(int m, int n) {
    static std::vector<std::pair<std::pair<int, int>, RadialProfile>> cache;
    for (auto& e : cache) {
        if (e.first == std::pair{m, n}) return e.second;
    }
    cache.push_back({{m, n}, shoot_ground_state(make_dims(m, n))});
    return cache.back().second;
}

const LambdaResult& lambda_22() {
    static const LambdaResult r = find_lambda(make_dims(2, 2), ground(2, 2));
    return r;
}

} // namespace

TEST_CASE("linear coefficients of the threshold problem") {
    const ProblemDims d = make_dims(2, 2);
    const LinearCoefficients lc = linear_coefficients(d, 1.5);
    CHECK(lc.C == doctest::Approx(1.0).epsilon(1e-15)); // (p-1) s_g / a_N = 3*2/6
    CHECK(lc.K == doctest::Approx(1.0 / 3.0 + 1.5).epsilon(1e-15));
    CHECK(lc.lambda == 1.5);
}

TEST_CASE("the ground state itself solves the zero-shift linear problem") {
    // With both coefficients set to s_g/a_N, u = f/f(0) is an exact solution;
    // the integrator must reproduce it.
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    RadialIvp ivp;
    ivp.n = d.n;
    const double k = d.kappa(), pm2 = d.p - 2.0;
    const RadialProfile* fp = &f;
    ivp.force = [fp, k, pm2](double t, double u) {
        return (k * std::pow(fp->eval(t), pm2) - k) * u;
    };
    ivp.u0 = 1.0;
    ivp.horizon = 10.0 / d.decay_rate();
    const Trajectory traj = integrate(ivp);
    CHECK(classify(traj).kind == TrajectoryKind::DecreasingPositive);
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        CHECK(traj.eval(t) == doctest::Approx(f.eval(t) / f.beta).epsilon(1e-8));
    }
}

TEST_CASE("trichotomy at the published sample shifts") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    CHECK(classify_at_lambda(f, d, 1.0).kind == TrajectoryKind::ZeroCrossing);
    CHECK(classify_at_lambda(f, d, 2.5).kind == TrajectoryKind::LocalMin);
    CHECK(classify_at_lambda(f, d, 1.80405).kind == TrajectoryKind::DecreasingPositive);
    // The long bisection horizon resolves the same shifts to an event.
    const double T = default_solver_horizon(d);
    CHECK(classify_at_lambda(f, d, 1.0, T).kind == TrajectoryKind::ZeroCrossing);
    CHECK(classify_at_lambda(f, d, 2.5, T).kind == TrajectoryKind::LocalMin);
}

TEST_CASE("threshold values for the published sample pairs") {
    CHECK(std::abs(lambda_22().lambda_mn - 1.8041) < 2e-3);
    const LambdaResult r33 = find_lambda(make_dims(3, 3), ground(3, 3));
    CHECK(std::abs(r33.lambda_mn - 2.8372) < 2e-3);
    const LambdaResult r72 = find_lambda(make_dims(7, 2), ground(7, 2));
    CHECK(std::abs(r72.lambda_mn - 6.9859) < 2e-3);
}

TEST_CASE("final bracket endpoints carry the two trajectory classes") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    const LambdaResult& r = lambda_22();
    CHECK(r.bracket_lo < r.lambda_mn);
    CHECK(r.lambda_mn < r.bracket_hi);
    CHECK(r.bracket_hi - r.bracket_lo <= 2e-6);
    CHECK(r.ground_state_beta == f.beta);
    const double T = r.horizon_used;
    CHECK(classify_at_lambda(f, d, r.bracket_lo, T).kind == TrajectoryKind::ZeroCrossing);
    CHECK(classify_at_lambda(f, d, r.bracket_hi, T).kind == TrajectoryKind::LocalMin);
}

TEST_CASE("classification is monotone across the admissible range") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    const double cap = lambda_admissible_cap(d, f);
    const double T = default_solver_horizon(d);
    bool seen_min = false;
    for (int i = 0; i <= 20; ++i) {
        const double lambda = cap * 0.999 * i / 20.0;
        const TrajectoryKind k = classify_at_lambda(f, d, lambda, T).kind;
        if (k == TrajectoryKind::LocalMin) seen_min = true;
        if (seen_min) {
            CHECK(k == TrajectoryKind::LocalMin);
        } else {
            CHECK(k == TrajectoryKind::ZeroCrossing);
        }
    }
    CHECK(seen_min);
}

TEST_CASE("the quotient infimum curve is strictly increasing") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    double prev = -1.0;
    for (int i = 0; i < 6; ++i) {
        const double lambda = 3.0 * i / 5.0;
        const double a = a_of_lambda(f, d, lambda);
        CHECK(a > prev);
        prev = a;
    }
}

TEST_CASE("quotient infimum endpoints: exact value at zero shift, bound everywhere") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    // At zero shift the ground state itself attains the infimum, so A(0) = s_g.
    const double a0 = a_of_lambda(f, d, 0.0);
    CHECK(std::abs(a0 - d.s_g) < 5e-6);
    // Analytic floor s_g f(0)^{2-p} from the radial-minimizer lower bound.
    const double floor = d.s_g * std::pow(f.beta, 2.0 - d.p);
    for (double lambda : {0.0, 0.7, 1.4, 2.1, 2.8}) {
        const Bracket b = a_of_lambda_bracket(f, d, lambda);
        CHECK(b.hi >= floor);
    }
}

TEST_CASE("both routes to the threshold agree") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    const double via_curve = lambda_from_a_curve(f, d, 1e-6);
    CHECK(std::abs(via_curve - lambda_22().lambda_mn) < 1e-5);
    // At the threshold the curve sits at the critical level (p-1) s_g.
    const double a_at = a_of_lambda(f, d, lambda_22().lambda_mn);
    CHECK(std::abs(a_at - (d.p - 1.0) * d.s_g) < 2e-5);
}

TEST_CASE("logarithmic derivative ordering under the constant-part sweep") {
    // K1 = 0.5 and K2 = 1.0 in the fixed-multiplier family; for (2,2) the
    // multiplier of f^{p-2} is exactly 1, so the shifts are K - s_g/a_N.
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    const RadialProfile* fp = &f;
    const auto make_ivp = [&](double K) {
        RadialIvp ivp;
        ivp.n = d.n;
        ivp.force = [fp, K](double t, double u) {
            return (std::pow(fp->eval(t), 2.0) - K) * u;
        };
        ivp.u0 = 1.0;
        ivp.horizon = 8.0;
        return ivp;
    };
    std::vector<double> nodes;
    for (int i = 1; i <= 60; ++i) nodes.push_back(0.02 * i);
    const Trajectory u1 = integrate(make_ivp(0.5), {}, nodes);
    const Trajectory u2 = integrate(make_ivp(1.0), {}, nodes);
    int compared = 0;
    for (double t : nodes) {
        const double a = u1.eval(t), b = u2.eval(t);
        if (a <= 0.0 || b <= 0.0) break;
        CHECK(u1.eval_deriv(t) / a < u2.eval_deriv(t) / b);
        ++compared;
    }
    CHECK(compared >= 40);
}

TEST_CASE("verdicts and the marginal band") {
    const ProblemDims d = make_dims(2, 2);
    const LambdaResult& r = lambda_22();
    CHECK(stability_verdict(d, 2.0, r).verdict == Verdict::Stable);
    CHECK(stability_verdict(d, 1.0, r).verdict == Verdict::Unstable);
    CHECK(stability_verdict(d, 1.8041, r).verdict == Verdict::Marginal);
    const StabilityReport rep = stability_verdict(d, 2.0, r);
    CHECK(rep.yamabe_metric_sufficient); // 2 >= lambda(2,2)
    CHECK(rep.marginal_band == 1e-4);
    CHECK_THROWS_AS(stability_verdict(d, 0.0, r), DomainError);
    CHECK_THROWS_AS(stability_verdict(d, -2.0, r), DomainError);

    const ProblemDims d32 = make_dims(3, 2);
    const LambdaResult r32 = find_lambda(d32, ground(3, 2));
    CHECK(stability_verdict(d32, 3.0, r32).verdict == Verdict::Stable);
}

TEST_CASE("doubling the horizon does not move the threshold") {
    const ProblemDims d = make_dims(2, 2);
    StabilityConfig wide;
    wide.horizon_factor = 80.0;
    const LambdaResult r = find_lambda(d, ground(2, 2), wide);
    CHECK(std::abs(r.lambda_mn - lambda_22().lambda_mn) < 1e-6);
}

TEST_CASE("shifts outside the admissible range are rejected with the cap") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = ground(2, 2);
    const double cap = lambda_admissible_cap(d, f);
    try {
        classify_at_lambda(f, d, cap + 0.5);
        FAIL("expected CoefficientPreconditionError");
    } catch (const CoefficientPreconditionError& e) {
        CHECK(e.admissible_cap() == doctest::Approx(cap).epsilon(1e-12));
    }
    CHECK_THROWS_AS(classify_at_lambda(f, d, -0.2), DomainError);
}
