#pragma once

// Chi-square goodness-of-fit helper for the frequency tests. Test-only.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace test_support {

namespace detail {

// Regularized incomplete gamma functions (series / continued fraction).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Upper tail P(X >= x) for a chi-square variable with dof degrees of freedom.
inline double chi_square_sf(double x, int dof) {
    if (x < 0 || dof < 1)
        throw std::invalid_argument("chi_square_sf: bad arguments");
    if (x == 0)
        return 1.0;
    double a = 0.5 * dof;
    double half_x = 0.5 * x;
    if (half_x < a + 1.0)
        return 1.0 - detail::gamma_p_series(a, half_x);
    return detail::gamma_q_contfrac(a, half_x);
}

/// Goodness-of-fit p-value of observed counts against expected probabilities.
inline double chi_square_gof_p(std::span<const long long> observed, std::span<const double> expected_probs) {
    if (observed.size() != expected_probs.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_gof_p: size mismatch");
    long long total = 0;
    for (long long c : observed)
        total += c;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double expected = expected_probs[i] * static_cast<double>(total);
        double diff = static_cast<double>(observed[i]) - expected;
        stat += diff * diff / expected;
    }
    return chi_square_sf(stat, static_cast<int>(observed.size()) - 1);
}

} // namespace test_support
