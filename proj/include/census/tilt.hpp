#pragma once

#include "census/count_table.hpp"
#include "census/errors.hpp"
#include "census/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace census {

// ---------------------------------------------------------------------------
// Tilted truncated geometric: Pr[T = i] = p(1-p)^{i-1} / (1-(1-p)^k), 1 <= i <= k.
// k-1 independent copies drive the balls-into-bins process; M = C(k,2) - sum T_j.
// ---------------------------------------------------------------------------

inline void require_tilt(const ExactRational& p) {
    if (p <= 0 || p > 1) throw std::domain_error("tilt p must lie in (0,1]");
}

inline ExactRational truncated_geometric_pmf(int k, const ExactRational& p, int i) {
    require_tilt(p);
    if (k < 1) throw std::domain_error("truncated_geometric_pmf: k must be >= 1");
    if (i < 1 || i > k) throw std::domain_error("truncated_geometric_pmf: i must lie in [1,k]");
    const ExactRational q = 1 - p;
    return p * rational_pow(q, i - 1) / (1 - rational_pow(q, k));
}

// First moment, closed form: E[T] = 1/p - k q^k / (1 - q^k).
inline ExactRational trunc_geom_mean(int k, const ExactRational& p) {
    require_tilt(p);
    const ExactRational qk = rational_pow(1 - p, k);
    return 1 / p - ExactRational(k) * qk / (1 - qk);
}

// Second moment, closed form:
// E[T^2] = (2 - p - q^k (2 + (2k-1)p + k^2 p^2)) / (p^2 (1 - q^k)).
inline ExactRational trunc_geom_second_moment(int k, const ExactRational& p) {
    require_tilt(p);
    const ExactRational qk = rational_pow(1 - p, k);
    const ExactRational kk(k);
    return (2 - p - qk * (2 + (2 * kk - 1) * p + kk * kk * p * p)) / (p * p * (1 - qk));
}

inline ExactRational trunc_geom_mean_by_summation(int k, const ExactRational& p) {
    require_tilt(p);
    const ExactRational q = 1 - p;
    ExactRational qpow = 1, acc = 0;
    for (int i = 1; i <= k; ++i) {
        acc += ExactRational(i) * qpow;
        qpow *= q;
    }
    return p * acc / (1 - rational_pow(q, k));
}

inline ExactRational trunc_geom_second_by_summation(int k, const ExactRational& p) {
    require_tilt(p);
    const ExactRational q = 1 - p;
    ExactRational qpow = 1, acc = 0;
    for (int i = 1; i <= k; ++i) {
        acc += ExactRational(i) * ExactRational(i) * qpow;
        qpow *= q;
    }
    return p * acc / (1 - rational_pow(q, k));
}

// mu = E[M] = C(k,2) - (k-1) E[T].
inline ExactRational mean_m(int k, const ExactRational& p) {
    return ExactRational(CountTable::pair_count(k)) - ExactRational(k - 1) * trunc_geom_mean(k, p);
}

inline ExactRational mean_m_by_summation(int k, const ExactRational& p) {
    return ExactRational(CountTable::pair_count(k)) -
           ExactRational(k - 1) * trunc_geom_mean_by_summation(k, p);
}

// Equivalent collapsed form: mu = C(k,2) - (k-1)/p + k(k-1) q^k / (1-q^k).
inline ExactRational mean_m_compact(int k, const ExactRational& p) {
    require_tilt(p);
    const ExactRational qk = rational_pow(1 - p, k);
    return ExactRational(CountTable::pair_count(k)) - ExactRational(k - 1) / p +
           ExactRational(static_cast<long long>(k) * (k - 1)) * qk / (1 - qk);
}

// sigma^2 = Var(M) = (k-1) Var(T), by independence of the k-1 placements.
inline ExactRational var_m(int k, const ExactRational& p) {
    const ExactRational m1 = trunc_geom_mean(k, p);
    const ExactRational m2 = trunc_geom_second_moment(k, p);
    return ExactRational(k - 1) * (m2 - m1 * m1);
}

// ---------------------------------------------------------------------------
// Floating point versions, stable for large k and small p.
// ---------------------------------------------------------------------------

inline long double q_power_real(long long k, long double p) {
    if (p >= 1.0L) return 0.0L;
    return std::exp(static_cast<long double>(k) * std::log1p(-p));
}

inline long double trunc_geom_mean_real(long long k, long double p) {
    const long double qk = q_power_real(k, p);
    return 1.0L / p - static_cast<long double>(k) * qk / (1.0L - qk);
}

inline long double trunc_geom_second_real(long long k, long double p) {
    const long double qk = q_power_real(k, p);
    const long double kk = static_cast<long double>(k);
    return (2.0L - p - qk * (2.0L + (2.0L * kk - 1.0L) * p + kk * kk * p * p)) /
           (p * p * (1.0L - qk));
}

inline long double trunc_geom_var_real(long long k, long double p) {
    const long double m1 = trunc_geom_mean_real(k, p);
    return trunc_geom_second_real(k, p) - m1 * m1;
}

inline long double mean_m_real(long long k, long double p) {
    const long double pairs = 0.5L * static_cast<long double>(k) * static_cast<long double>(k - 1);
    return pairs - static_cast<long double>(k - 1) * trunc_geom_mean_real(k, p);
}

inline long double var_m_real(long long k, long double p) {
    return static_cast<long double>(k - 1) * trunc_geom_var_real(k, p);
}

// ---------------------------------------------------------------------------
// The tilt equation p * mu(p) = l.  p -> p mu(p) increases from 0 to the
// complexity of the complete graph, so plain bisection suffices.
// ---------------------------------------------------------------------------

inline double solve_tilt(long long k, long long l, double tol_abs = -1.0) {
    if (k < 2) throw std::domain_error("solve_tilt: k must be >= 2");
    const long long lmax = CountTable::max_complexity(k);
    if (l < 1 || l > lmax)
        throw std::domain_error("solve_tilt: no tilt in (0,1] satisfies p mu(p) = " +
                                std::to_string(l) + " for k = " + std::to_string(k));
    if (l == lmax) return 1.0;   // p = 1 gives p mu = C(k,2) - (k-1) exactly
    const long double target = static_cast<long double>(l);
    const long double tol =
        tol_abs > 0 ? static_cast<long double>(tol_abs) : std::max(1e-12L, 1e-16L * target);

    long double lo = 0.0L, hi = 1.0L;
    long double mid = 0.5L;
    for (int it = 0; it < 300; ++it) {
        mid = 0.5L * (lo + hi);
        const long double g = mid * mean_m_real(k, mid) - target;
        if (std::abs(g) <= tol) return static_cast<double>(mid);
        if (g < 0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= std::numeric_limits<long double>::min()) break;
    }
    const long double resid = std::abs(mid * mean_m_real(k, mid) - target);
    if (resid > tol)
        throw std::runtime_error("solve_tilt: bisection residual " + std::to_string((double)resid) +
                                 " above tolerance");
    return static_cast<double>(mid);
}

// ---------------------------------------------------------------------------
// Scalar limit functions of c = pk.
// ---------------------------------------------------------------------------

// f1(c) = c [ 1/2 - (1-(c+1)e^{-c}) / (c(1-e^{-c})) ];  p mu ~ k f1(c) at p = c/k.
inline long double f1(long double c) {
    if (c <= 0) throw std::domain_error("f1: c must be positive");
    const long double em = std::exp(-c);
    const long double a = -std::expm1(-c);          // 1 - e^{-c}
    const long double b = a - c * em;               // 1 - (c+1)e^{-c}
    return c * (0.5L - b / (c * a));
}

// f2(c) with kappa = c/(1-e^{-c}); sigma^2 ~ k^3 f2(c) at p = c/k.
inline long double f2(long double c) {
    if (c <= 0) throw std::domain_error("f2: c must be positive");
    const long double em = std::exp(-c);
    const long double kappa = c / (-std::expm1(-c));
    const long double c1 = 1.0L / c, c2 = c1 * c1, c3 = c2 * c1;
    const long double second = kappa * (em * (-c1 - 2.0L * c2 - 2.0L * c3) + 2.0L * c3);
    const long double first = kappa * (em * (-c1 - c2) + c2);
    return second - first * first;
}

// Large-regime limit of Pr[TREE] at p = c/k.
inline long double tree_probability_limit(long double c) {
    return 1.0L - (c + 1.0L) * std::exp(-c);
}

// Solve e^{-c} = (2(beta+1) - c) / (2(beta+1) + c) for c in (0, 2(beta+1)).
// Bisection runs on the cleared form 2(beta+1)(e^{-c}-1) + c(e^{-c}+1), which
// shares the root and is stable near c = 0.
inline long double solve_c(long double beta) {
    if (beta <= 0) throw std::domain_error("solve_c: beta must be positive");
    const long double b2 = 2.0L * (beta + 1.0L);
    auto h = [&](long double c) {
        return b2 * std::expm1(-c) + c * (std::exp(-c) + 1.0L);
    };
    long double lo = 1e-12L, hi = b2 - 1e-12L;
    if (h(lo) >= 0 || h(hi) <= 0)
        throw std::runtime_error("solve_c: bracketing failed");
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (h(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    const long double c = 0.5L * (lo + hi);
    const long double resid = std::abs(std::exp(-c) - (b2 - c) / (b2 + c));
    if (resid > 1e-12L)
        throw std::runtime_error("solve_c: residual " + std::to_string((double)resid) +
                                 " above 1e-12");
    return c;
}

// Expected ball count in the leftmost bin: lambda = (k-1) p / (1-(1-p)^k).
inline long double lambda_value(long long k, long double p) {
    return static_cast<long double>(k - 1) * p / (1.0L - q_power_real(k, p));
}

// Expected ball count in the rightmost bin: lambda^R = (k-1) p (1-p)^{k-1} / (1-(1-p)^k).
inline long double lambda_r_value(long long k, long double p) {
    return static_cast<long double>(k - 1) * p * q_power_real(k - 1, p) /
           (1.0L - q_power_real(k, p));
}

inline double epsilon_value(long long k, double p) { return p * static_cast<double>(k) / 2.0; }

// ---------------------------------------------------------------------------
// Regimes of l relative to k.  The cutoff exponents are artifact policy; the
// three asymptotic formulas remain individually callable regardless.
// ---------------------------------------------------------------------------

enum class Regime { small, large, very_large, out_of_range };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::small: return "small";
        case Regime::large: return "large";
        case Regime::very_large: return "very_large";
        default: return "out_of_range";
    }
}

struct RegimeTag {
    Regime kind = Regime::small;
    double c_or_beta = std::numeric_limits<double>::quiet_NaN();   // c for the large regime
};

inline RegimeTag classify_regime(long long k, double l,
                                 double small_exp = 0.9, double large_exp = 1.1) {
    if (k < 2) throw std::domain_error("classify_regime: k must be >= 2");
    const double kd = static_cast<double>(k);
    if (l > kd * std::log(kd)) return {Regime::out_of_range, {}};
    if (l <= std::pow(kd, small_exp)) return {Regime::small, {}};
    if (l < std::pow(kd, large_exp))
        return {Regime::large, static_cast<double>(solve_c(l / kd))};
    return {Regime::very_large, {}};
}

// Bundle of the derived quantities attached to a (k, p) pair.
struct TiltedModel {
    long long k = 0;
    ExactRational p;
    double lambda = 0, lambda_r = 0, epsilon = 0;
    ExactRational mu, sigma2;
    RegimeTag regime;

    static TiltedModel make(long long k, const ExactRational& p) {
        require_tilt(p);
        if (k < 2) throw std::domain_error("TiltedModel: k must be >= 2");
        TiltedModel m;
        m.k = k;
        m.p = p;
        const double pd = p.convert_to<double>();
        m.lambda = static_cast<double>(lambda_value(k, pd));
        m.lambda_r = static_cast<double>(lambda_r_value(k, pd));
        m.epsilon = epsilon_value(k, pd);
        m.mu = mean_m(static_cast<int>(k), p);
        m.sigma2 = var_m(static_cast<int>(k), p);
        const double l_implied = std::max(0.0, pd * m.mu.convert_to<double>());
        m.regime = classify_regime(k, l_implied);
        return m;
    }
};

}
