#pragma once

#include <cmath>

namespace yamabe {

/// Dimension pair (m, n) of the product M^m x R^n with every derived constant
/// used by the solvers. Immutable value type; all fields are fixed by m and n.
struct ProblemDims {
    int m;      ///< dimension of the closed factor, m >= 2
    int n;      ///< Euclidean dimension, n >= 2
    int N;      ///< total dimension m + n
    double p;   ///< critical Sobolev exponent 2N/(N-2)
    double a_N; ///< conformal Laplacian coefficient 4(N-1)/(N-2)
    double s_g; ///< scalar curvature of the closed factor, normalized to m(m-1)

    /// Coefficient s_g/a_N of the normalized ground-state equation; also the
    /// square of the linearized decay rate at infinity.
    double kappa() const { return s_g / a_N; }

    /// Asymptotic decay rate mu = sqrt(s_g/a_N) of the ground state.
    double decay_rate() const { return std::sqrt(s_g / a_N); }
};

/// Builds the dimension constants, rejecting m < 2 or n < 2.
ProblemDims make_dims(int m, int n);

} // namespace yamabe
