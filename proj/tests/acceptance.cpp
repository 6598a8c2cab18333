#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "yamabe/quadrature.hpp"
#include "yamabe/stability.hpp"
#include "yamabe/table_runner.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

// Acceptance suite: each criterion prints one PASS/FAIL line with its gate.

using namespace yamabe;

namespace {

struct Shared {
    std::vector<DimensionPair> pairs;
    std::vector<PairOutcome> defaults;
    std::vector<PairOutcome> tight;   // halved integrator tolerances, doubled grid
    std::vector<PairOutcome> wide;    // doubled horizon
    std::map<std::pair<int, int>, RadialProfile> profiles;
};

const Shared& shared() {
    static const Shared s = [] {
        Shared sh;
        for (const auto& r : reference_thresholds()) sh.pairs.push_back({r.m, r.n});

        SolveSettings defaults;
        sh.defaults = run_pairs(sh.pairs, defaults, 0);

        SolveSettings tight;
        tight.shoot.ode.abs_tol = tight.shoot.ode.rel_tol = 5e-11;
        tight.stability.ode.abs_tol = tight.stability.ode.rel_tol = 5e-11;
        tight.shoot.grid_intervals = 8192;
        sh.tight = run_pairs(sh.pairs, tight, 0);

        SolveSettings wide;
        wide.stability.horizon_factor = 80.0;
        sh.wide = run_pairs(sh.pairs, wide, 0);

        for (const auto& p : sh.pairs) {
            sh.profiles.emplace(std::pair{p.m, p.n},
                                shoot_ground_state(make_dims(p.m, p.n)));
        }
        return sh;
    }();
    return s;
}

void report(int idx, bool ok, const char* text) {
    std::printf("[criterion %d] %s  %s\n", idx, ok ? "PASS" : "FAIL", text);
    std::fflush(stdout);
}

} // namespace

TEST_CASE("criterion 1: bundled threshold set reproduced within 5e-3") {
    const Shared& sh = shared();
    bool ok = true;
    for (const auto& o : sh.defaults) {
        REQUIRE(o.ok);
        const double ref = find_reference(o.m, o.n)->lambda;
        const double dev = std::abs(o.result.lambda_mn - ref);
        const bool row_ok = dev <= 5e-3;
        if (!row_ok) {
            std::printf("  (%d,%d): computed %.6f, bundled %.4f, |dev| = %.2e > 5e-3\n",
                        o.m, o.n, o.result.lambda_mn, ref, dev);
        }
        ok = ok && row_ok;
        INFO("pair (", o.m, ",", o.n, ") computed ", o.result.lambda_mn, " bundled ", ref);
        CHECK(dev <= 5e-3);
    }
    report(1, ok, "all 21 bundled thresholds within 5e-3");
    if (!ok) {
        MESSAGE("the (2,6) bundled value 1.4459 disagrees with this solver and with an "
                "independent recomputation (both give 1.46040, stable under tolerance, "
                "grid and horizon changes); the deviation is reported as-is");
    }
}

TEST_CASE("criterion 2: trichotomy at the three published sample shifts") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = shared().profiles.at({2, 2});
    const bool a = classify_at_lambda(f, d, 1.0).kind == TrajectoryKind::ZeroCrossing;
    const bool b = classify_at_lambda(f, d, 2.5).kind == TrajectoryKind::LocalMin;
    const bool c =
        classify_at_lambda(f, d, 1.80405).kind == TrajectoryKind::DecreasingPositive;
    CHECK(a);
    CHECK(b);
    CHECK(c);
    report(2, a && b && c,
           "(2,2): zero-crossing at 1.0, local-min at 2.5, decreasing-positive at 1.80405");
}

TEST_CASE("criterion 3: virial identity residuals below 1e-6 for every pair") {
    bool ok = true;
    double worst = 0.0;
    for (const auto& [key, profile] : shared().profiles) {
        const IntegralReport r = ground_state_report(profile);
        const double w =
            std::max({r.virial_grad_l2, r.virial_grad_lp, r.virial_l2_lp});
        worst = std::max(worst, w);
        ok = ok && w < 1e-6;
        INFO("pair (", key.first, ",", key.second, ") worst residual ", w);
        CHECK(w < 1e-6);
    }
    std::printf("  worst residual over the 21 pairs: %.3e\n", worst);
    report(3, ok, "all virial residuals < 1e-6");
}

TEST_CASE("criterion 4: direct and rescaled ground states agree in sup norm") {
    bool ok = true;
    for (auto [m, n] : {std::pair{2, 2}, std::pair{3, 2}}) {
        const ProblemDims d = make_dims(m, n);
        const RadialProfile& direct = shared().profiles.at({m, n});
        const RadialProfile rescaled = rescale_normalized(shoot_unit_ground_state(d), d);
        double sup = 0.0;
        for (int i = 0; i <= 800; ++i) {
            const double t = direct.t_grid() * i / 800.0;
            sup = std::max(sup, std::abs(direct.eval(t) - rescaled.eval(t)));
        }
        INFO("pair (", m, ",", n, ") sup deviation ", sup);
        CHECK(sup <= 1e-6 * direct.beta);
        ok = ok && sup <= 1e-6 * direct.beta;
    }
    report(4, ok, "(2,2) and (3,2): sup |direct - rescaled| <= 1e-6 f(0)");
}

TEST_CASE("criterion 5: quotient-curve consistency for (2,2)") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = shared().profiles.at({2, 2});
    const LambdaResult direct = find_lambda(d, f);
    const double via_curve = lambda_from_a_curve(f, d, 1e-6);
    const bool roots_agree = std::abs(via_curve - direct.lambda_mn) <= 1e-5;
    CHECK(roots_agree);

    bool increasing = true;
    bool bounded_below = true;
    double prev = -1e300;
    const double floor = 2.0 / (f.beta * f.beta); // s_g f(0)^{2-p} for (2,2)
    for (int i = 0; i < 20; ++i) {
        const double lambda = 3.0 * i / 19.0;
        const Bracket b = a_of_lambda_bracket(f, d, lambda);
        increasing = increasing && b.mid() > prev;
        prev = b.mid();
        bounded_below = bounded_below && b.hi >= floor;
    }
    CHECK(increasing);
    CHECK(bounded_below);

    const Bracket at_zero = a_of_lambda_bracket(f, d, 0.0);
    const bool zero_bound = at_zero.lo <= 2.0;
    CHECK(zero_bound);

    report(5, roots_agree && increasing && bounded_below && zero_bound,
           "root agreement 1e-5, increasing on 20-point grid, A(0) <= 2, floor holds");
}

TEST_CASE("criterion 6: the threshold never exceeds the closed-factor dimension") {
    bool ok = true;
    for (const auto& o : shared().defaults) {
        REQUIRE(o.ok);
        INFO("pair (", o.m, ",", o.n, ") lambda ", o.result.lambda_mn);
        CHECK(o.result.lambda_mn <= o.m);
        ok = ok && o.result.lambda_mn <= o.m;
    }
    report(6, ok, "lambda(m,n) <= m for all 21 pairs");
}

TEST_CASE("criterion 7: logarithmic-derivative ordering under the constant sweep") {
    const ProblemDims d = make_dims(2, 2);
    const RadialProfile& f = shared().profiles.at({2, 2});
    const RadialProfile* fp = &f;
    const auto make_ivp = [&](double K) {
        RadialIvp ivp;
        ivp.n = d.n;
        // Fixed multiplier (p-1) s_g / a_N = 1 for (2,2).
        ivp.force = [fp, K](double t, double u) {
            return (std::pow(fp->eval(t), 2.0) - K) * u;
        };
        ivp.u0 = 1.0;
        ivp.horizon = 8.0;
        return ivp;
    };
    std::vector<double> nodes;
    for (int i = 1; i <= 100; ++i) nodes.push_back(0.015 * i);
    const Trajectory u1 = integrate(make_ivp(0.5), {}, nodes);
    const Trajectory u2 = integrate(make_ivp(1.0), {}, nodes);
    bool ok = true;
    int compared = 0;
    for (double t : nodes) {
        const double a = u1.eval(t), b = u2.eval(t);
        if (a <= 0.0 || b <= 0.0) break;
        ok = ok && u1.eval_deriv(t) / a < u2.eval_deriv(t) / b;
        ++compared;
    }
    CHECK(ok);
    CHECK(compared >= 60);
    report(7, ok && compared >= 60,
           "(2,2), K=0.5 vs K=1.0: u'/u ordered at every shared positive grid point");
}

TEST_CASE("criterion 8: robustness under tolerance, grid, and horizon changes") {
    const Shared& sh = shared();
    bool tol_ok = true, horizon_ok = true;
    double worst_tol = 0.0, worst_hor = 0.0;
    for (size_t i = 0; i < sh.pairs.size(); ++i) {
        REQUIRE(sh.tight[i].ok);
        REQUIRE(sh.wide[i].ok);
        const double dt = std::abs(sh.tight[i].result.lambda_mn -
                                   sh.defaults[i].result.lambda_mn);
        const double dh = std::abs(sh.wide[i].result.lambda_mn -
                                   sh.defaults[i].result.lambda_mn);
        worst_tol = std::max(worst_tol, dt);
        worst_hor = std::max(worst_hor, dh);
        tol_ok = tol_ok && dt < 1e-4;
        horizon_ok = horizon_ok && dh < 1e-6;
        INFO("pair (", sh.pairs[i].m, ",", sh.pairs[i].n, ") tol shift ", dt,
             " horizon shift ", dh);
        CHECK(dt < 1e-4);
        CHECK(dh < 1e-6);
    }
    std::printf("  worst shift: tolerance/grid %.3e, horizon %.3e\n", worst_tol, worst_hor);
    report(8, tol_ok && horizon_ok,
           "tightened tolerances/grid shift < 1e-4; doubled horizon shifts < 1e-6");
}
