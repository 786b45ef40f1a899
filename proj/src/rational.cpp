#include "ralab/rational.hpp"

#include <cmath>
#include <limits>

namespace ralab {

Rational rationalize(double x, std::int64_t max_den, double tol) {
    if (!std::isfinite(x))
        throw std::domain_error("cannot rationalize non-finite value");
    bool neg = x < 0;
    double v = neg ? -x : x;
    // Continued-fraction convergents p/q of v.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int iter = 0; iter < 64; ++iter) {
        double fa = std::floor(frac);
        if (fa > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2))
            break;
        auto a = static_cast<std::int64_t>(fa);
        __int128 p2 = static_cast<__int128>(a) * p1 + p0;
        __int128 q2 = static_cast<__int128>(a) * q1 + q0;
        if (q2 > max_den || p2 > std::numeric_limits<std::int64_t>::max()) break;
        p0 = p1; q0 = q1;
        p1 = static_cast<std::int64_t>(p2);
        q1 = static_cast<std::int64_t>(q2);
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - v) <= tol * std::max(1.0, v)) break;
        double rem = frac - fa;
        if (rem < 1e-18) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0)
        throw std::domain_error("cannot rationalize value: " + std::to_string(x));
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - v) > tol * std::max(1.0, v) + 1e-15)
        throw std::domain_error("no rational within tolerance for " + std::to_string(x));
    return neg ? Rational(-p1, q1) : Rational(p1, q1);
}

}  // namespace ralab
