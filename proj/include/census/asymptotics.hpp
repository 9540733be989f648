#pragma once

#include "census/count_table.hpp"
#include "census/exact.hpp"
#include "census/tilt.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace census {

// Variance proxy for the edge count BIN(M*, p): p*mu + p^2*sigma^2.  The
// exact-rational rearrangement can dip below zero for tiny p, where the true
// variance is already within roundoff of zero, so clamp.
inline long double sigma_y_squared(long long k, long double p) {
    const long double v = p * mean_m_real(k, p) + p * p * var_m_real(k, p);
    return v < 0 ? 0.0L : v;
}

struct AsymptoticEstimate {
    long long k = 0;
    long long l = 0;
    RegimeTag regime;
    double log_value = std::numeric_limits<double>::quiet_NaN();
    // Secondary route where the regime admits one (sparse-count form for the
    // linear regime); NaN otherwise.
    double alt_log_value = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> components;
    bool scope_warning = false;
};

namespace detail {

inline double log_asymptotic_small(long long k, long long l, AsymptoticEstimate& est) {
    if (l == 0) {
        // Tree count is k^{k-2} exactly; log it directly.
        if (k <= 20000) return log_exact(integer_pow(ExactInteger(k), static_cast<unsigned long long>(k - 2)));
        return static_cast<double>(k - 2) * std::log(static_cast<double>(k));
    }
    const double kd = static_cast<double>(k);
    const double ld = static_cast<double>(l);
    const double log_k = std::log(kd);
    const double power_term = (kd - 2.0 + 1.5 * ld) * log_k;
    const double complexity_term = 0.5 * ld * (1.0 - std::log(12.0 * ld)) + 0.5 * std::log(ld);
    const double constant_term = std::log(3.0) - 0.5 * std::log(M_PI);
    est.components["power_term"] = power_term;
    est.components["complexity_term"] = complexity_term;
    est.components["constant_term"] = constant_term;
    if (ld > std::pow(kd, 0.45)) est.scope_warning = true;
    return power_term + complexity_term + constant_term;
}

inline double log_asymptotic_large(long long k, long long l, AsymptoticEstimate& est) {
    const double kd = static_cast<double>(k);
    const double ld = static_cast<double>(l);
    const double beta = ld / kd;
    const double c = static_cast<double>(solve_c(beta));
    const double p = c / kd;
    const double f2c = static_cast<double>(f2(c));

    // Factor route: evaluate the three factors at p = c/k and divide out the
    // edge/non-edge weights.  The first factor is kept exact; its naive
    // exponential limit is too coarse at this order.
    const double log_a1 = (kd - 1.0) * std::log(-std::expm1(kd * std::log1p(-p)));
    const double log_a2 = std::log(static_cast<double>(tree_probability_limit(c)));
    const double log_a3 = -0.5 * std::log(2.0 * M_PI * ld * (1.0 + c * c * f2c / beta));
    const double edges = kd + ld - 1.0;
    const double pairs = 0.5 * kd * (kd - 1.0);
    const double log_weight = edges * std::log(p) + (pairs - edges) * std::log1p(-p);
    const double factor_route = log_a1 + log_a2 + log_a3 - log_weight;

    // Closed form A * B^k * k^{(1+beta)k} * k^{-3/2}, kept as a cross-check.
    const double log_A = std::log(c * (c - 2.0 * beta)) -
                         0.5 * std::log(8.0 * M_PI * beta * (1.0 + c * c * f2c / beta)) -
                         c * (0.5 * beta + 1.0);
    const double log_B = std::log(2.0) - beta * std::log(c) -
                         0.5 * std::log(4.0 * (beta + 1.0) * (beta + 1.0) - c * c);
    const double closed_route =
        log_A + kd * log_B + (1.0 + beta) * kd * std::log(kd) - 1.5 * std::log(kd);

    est.components["c"] = c;
    est.components["beta"] = beta;
    est.components["log_a1"] = log_a1;
    est.components["log_a2"] = log_a2;
    est.components["log_a3"] = log_a3;
    est.components["log_weight"] = log_weight;
    est.alt_log_value = closed_route;
    return factor_route;
}

inline double log_asymptotic_very_large(long long k, long long l, AsymptoticEstimate& est) {
    const long long edges = k + l - 1;
    const ExactInteger pairs = ExactInteger(k) * (k - 1) / 2;
    est.components["edges"] = static_cast<double>(edges);
    if (edges <= 20000 && pairs <= ExactInteger(std::numeric_limits<long long>::max())) {
        return log_exact(binomial(pairs.convert_to<long long>(), edges));
    }
    const double a = pairs.convert_to<double>();
    const double b = static_cast<double>(edges);
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

}

// Log of the asymptotic connected-count approximation for the regime that
// (k, l) falls in.
inline AsymptoticEstimate asymptotic_log_count(long long k, long long l) {
    if (k < 2) throw std::domain_error("asymptotic_log_count: k must be >= 2");
    if (l < 0) throw std::domain_error("asymptotic_log_count: l must be >= 0");
    AsymptoticEstimate est;
    est.k = k;
    est.l = l;
    est.regime = classify_regime(k, static_cast<double>(l));
    switch (est.regime.kind) {
        case Regime::small:
            est.log_value = detail::log_asymptotic_small(k, l, est);
            break;
        case Regime::large:
            est.log_value = detail::log_asymptotic_large(k, l, est);
            break;
        case Regime::very_large:
            est.log_value = detail::log_asymptotic_very_large(k, l, est);
            break;
        case Regime::out_of_range:
            throw std::domain_error("asymptotic_log_count: l exceeds k*ln(k); no supported regime");
    }
    return est;
}

struct ComparisonRow {
    long long k = 0;
    long long l = 0;
    double log_exact_value = 0.0;
    double log_asymptotic = 0.0;
    double rel_log_error = 0.0;
    std::string regime;
};

// Exact-vs-asymptotic comparison over a k sweep; the exact column needs the
// count table, so the usual caps apply.
inline std::vector<ComparisonRow> compare_table(const std::vector<long long>& ks,
                                                const std::function<long long(long long)>& l_of_k,
                                                const CountTable& table) {
    std::vector<ComparisonRow> rows;
    rows.reserve(ks.size());
    for (long long k : ks) {
        const long long l = l_of_k(k);
        if (l < 0 || l > CountTable::max_complexity(static_cast<int>(k)))
            throw std::domain_error("compare_table: l out of range for k = " + std::to_string(k));
        ComparisonRow row;
        row.k = k;
        row.l = l;
        row.log_exact_value = log_exact(table.by_complexity(static_cast<int>(k), l));
        const AsymptoticEstimate est = asymptotic_log_count(k, l);
        row.log_asymptotic = est.log_value;
        row.rel_log_error = std::abs(row.log_asymptotic - row.log_exact_value) /
                            std::max(1.0, std::abs(row.log_exact_value));
        row.regime = regime_name(est.regime.kind);
        rows.push_back(row);
    }
    return rows;
}

}
