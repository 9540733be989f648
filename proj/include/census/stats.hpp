#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace census {

inline double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

namespace detail {

// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction (x >= a+1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}

// Q(a,x) = Pr[Gamma(a) > x]; chi-square tail is Q(df/2, x/2).
inline double gamma_q(double a, double x) {
    if (a <= 0) throw std::domain_error("gamma_q: shape must be positive");
    if (x < 0) throw std::domain_error("gamma_q: x must be >= 0");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

inline double chi_square_pvalue(double statistic, int df) {
    if (df <= 0) throw std::domain_error("chi_square_pvalue: df must be positive");
    if (statistic < 0) throw std::domain_error("chi_square_pvalue: statistic must be >= 0");
    return gamma_q(0.5 * df, 0.5 * statistic);
}

}
