#include "yamabe/dims.hpp"

#include "yamabe/errors.hpp"

#include <string>

namespace yamabe {

ProblemDims make_dims(int m, int n) {
    if (m < 2) {
        throw DomainError("closed-factor dimension m must satisfy m >= 2, got m = " +
                          std::to_string(m));
    }
    if (n < 2) {
        throw DomainError("Euclidean dimension n must satisfy n >= 2, got n = " +
                          std::to_string(n));
    }
    ProblemDims d;
    d.m = m;
    d.n = n;
    d.N = m + n;
    d.p = 2.0 * d.N / (d.N - 2);
    d.a_N = 4.0 * (d.N - 1) / (d.N - 2);
    d.s_g = static_cast<double>(m) * (m - 1);
    return d;
}

} // namespace yamabe
