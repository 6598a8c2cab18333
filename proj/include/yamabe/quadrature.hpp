#pragma once

#include "yamabe/dims.hpp"
#include "yamabe/ground_state.hpp"

#include <functional>

namespace yamabe {

/// Integrals of a curvature-normalized ground state and the relative residuals
/// of the three virial identities it must satisfy:
///   a_N m ||grad f||^2 = n s_g ||f||_2^2         (gradient / mass)
///   N a_N ||grad f||^2 = n s_g ||f||_p^p         (gradient / critical power)
///   N ||f||_2^2        = m ||f||_p^p             (mass / critical power)
struct IntegralReport {
    double l2_sq;
    double lp_p;
    double grad_sq;
    double sphere_factor; ///< surface measure of the unit (n-1)-sphere
    double virial_grad_l2;
    double virial_grad_lp;
    double virial_l2_lp;
};

/// omega_{n-1} = 2 pi^{n/2} / Gamma(n/2).
double sphere_surface(int n);

/// Upper incomplete gamma Gamma(s, x) by Lentz continued fraction; accurate
/// for x well above s, which is the only regime the tail integrals hit.
double upper_incomplete_gamma(double s, double x);

/// Integrand g(f, f', t) of a radial integral  omega_{n-1} * Int g t^{n-1} dt.
/// Power integrands and the squared gradient integrate the tail model in
/// closed form; custom integrands fall back to adaptive quadrature there.
class Integrand {
  public:
    static Integrand power(double f_power, double t_power = 0.0);
    static Integrand grad_squared();
    static Integrand custom(std::function<double(double, double, double)> g);

    double operator()(double f, double fp, double t) const;

    enum class Kind { Power, GradSquared, Custom };
    Kind kind() const { return kind_; }
    double f_power() const { return f_power_; }
    double t_power() const { return t_power_; }

  private:
    Kind kind_ = Kind::Custom;
    double f_power_ = 0.0;
    double t_power_ = 0.0;
    std::function<double(double, double, double)> fn_;
};

/// n-dimensional integral of the radial integrand over the profile: composite
/// Simpson on the grid plus the tail contribution beyond it.
double radial_integral(const RadialProfile& profile, const Integrand& g);

/// Norms and virial residuals of a curvature-normalized ground state.
IntegralReport ground_state_report(const RadialProfile& profile);

/// Best constant of the Gagliardo-Nirenberg inequality
///   ||u||_p^2 <= sigma ||grad u||_2^{2n/N} ||u||_2^{2m/N},
/// evaluated on the unit-normalized minimizer (the quotient is invariant under
/// rescaling, so the normalization drops out).
double gn_best_constant(const RadialProfile& w, const ProblemDims& dims);

/// Restricted Yamabe constant s_g (vol_M ||f||_p^p)^{2/N} of the product with
/// the conformal ground-state metric; vol_M is the volume of the closed factor.
double yamabe_constant_rn(const RadialProfile& profile, const ProblemDims& dims, double vol_M);

} // namespace yamabe
