#pragma once

#include "census/count_table.hpp"
#include "census/errors.hpp"
#include "census/exact.hpp"
#include "census/tilt.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace census {

// ---------------------------------------------------------------------------
// The queue walk.  k-1 balls land in bins 1..k (Z_i balls in bin i); the walk
// is Y_0 = 1, Y_i = Y_{i-1} + Z_i - 1.  TREE is the event that Y stays
// positive through step k-1; the excess statistic is
// m_stat = C(k,2) - sum_j T_j = sum_{i=1..k-1} (Y_i - 1).
// ---------------------------------------------------------------------------

struct Placement {
    int k = 0;
    std::vector<int> T;   // ball j lands in bin T[j], values in [1,k]
    std::vector<int> Z;   // Z[i-1] = number of balls in bin i
};

inline Placement placement_from_T(int k, std::vector<int> T) {
    if (static_cast<int>(T.size()) != k - 1)
        throw std::invalid_argument("placement_from_T: need k-1 ball positions");
    Placement pl;
    pl.k = k;
    pl.Z.assign(static_cast<size_t>(k), 0);
    for (int t : T) {
        if (t < 1 || t > k) throw std::invalid_argument("placement_from_T: bin out of range");
        pl.Z[static_cast<size_t>(t - 1)]++;
    }
    pl.T = std::move(T);
    return pl;
}

struct WalkTrace {
    std::vector<long long> Y;   // Y[0..k], Y[0] = 1, Y[k] = 0
    bool tree = false;
    long long m_stat = 0;
};

inline WalkTrace walk_from_counts(const std::vector<int>& Z) {
    const int k = static_cast<int>(Z.size());
    if (k < 1) throw std::invalid_argument("walk_from_counts: empty bin vector");
    long long total = 0;
    for (int z : Z) {
        if (z < 0) throw std::invalid_argument("walk_from_counts: negative bin count");
        total += z;
    }
    if (total != k - 1)
        throw std::invalid_argument("walk_from_counts: bin counts must sum to k-1");

    WalkTrace trace;
    trace.Y.resize(static_cast<size_t>(k) + 1);
    trace.Y[0] = 1;
    trace.tree = true;
    long long weighted = 0, excess = 0;
    for (int i = 1; i <= k; ++i) {
        trace.Y[static_cast<size_t>(i)] = trace.Y[static_cast<size_t>(i - 1)] + Z[static_cast<size_t>(i - 1)] - 1;
        weighted += static_cast<long long>(i) * Z[static_cast<size_t>(i - 1)];
        if (i <= k - 1) {
            excess += trace.Y[static_cast<size_t>(i)] - 1;
            if (trace.Y[static_cast<size_t>(i)] <= 0) trace.tree = false;
        }
    }
    const long long direct = CountTable::pair_count(k) - weighted;
    if (direct != excess)
        throw std::logic_error("walk_from_counts: excess-sum identity violated");
    trace.m_stat = direct;
    return trace;
}

// ---------------------------------------------------------------------------
// Exact DP over bins.  Conditioned on s balls having landed in bins < t, bin t
// receives BIN(k-1-s, rho_t) balls with rho_t = p / (1-(1-p)^{k-t+1}); TREE
// prunes states with fewer than t balls after bin t.
// ---------------------------------------------------------------------------

namespace detail {

inline ExactRational bin_take_probability(int k, const ExactRational& p, int t) {
    return p / (1 - rational_pow(1 - p, k - t + 1));
}

}

inline ExactRational prob_tree_exact(int k, const ExactRational& p, int k_cap = 200) {
    require_tilt(p);
    if (k < 2) throw std::domain_error("prob_tree_exact: k must be >= 2");
    if (k > k_cap)
        throw cap_error("prob_tree_exact: k = " + std::to_string(k) +
                        " exceeds exact-mode cap " + std::to_string(k_cap));
    const int balls = k - 1;
    std::vector<ExactRational> prob(static_cast<size_t>(balls) + 1);
    prob[0] = 1;
    std::vector<ExactRational> rho_pow(static_cast<size_t>(balls) + 1);
    std::vector<ExactRational> rem_pow(static_cast<size_t>(balls) + 1);
    for (int t = 1; t <= k - 1; ++t) {
        const ExactRational rho = detail::bin_take_probability(k, p, t);
        const ExactRational rem = 1 - rho;
        rho_pow[0] = 1;
        rem_pow[0] = 1;
        for (int z = 1; z <= balls; ++z) {
            rho_pow[static_cast<size_t>(z)] = rho_pow[static_cast<size_t>(z - 1)] * rho;
            rem_pow[static_cast<size_t>(z)] = rem_pow[static_cast<size_t>(z - 1)] * rem;
        }
        std::vector<ExactRational> next(static_cast<size_t>(balls) + 1);
        for (int s = t - 1; s <= balls; ++s) {
            if (prob[static_cast<size_t>(s)] == 0) continue;
            const int free = balls - s;
            for (int z = std::max(0, t - s); z <= free; ++z) {
                next[static_cast<size_t>(s + z)] +=
                    prob[static_cast<size_t>(s)] * ExactInteger(binomial(free, z)) *
                    rho_pow[static_cast<size_t>(z)] * rem_pow[static_cast<size_t>(free - z)];
            }
        }
        prob = std::move(next);
    }
    return prob[static_cast<size_t>(balls)];
}

// Float-mode DP, usable far beyond the exact cap.
inline double prob_tree_float(long long k, double p) {
    if (p <= 0 || p > 1) throw std::domain_error("prob_tree_float: p must lie in (0,1]");
    if (k < 2) throw std::domain_error("prob_tree_float: k must be >= 2");
    const long long balls = k - 1;
    std::vector<double> prob(static_cast<size_t>(balls) + 1, 0.0);
    prob[0] = 1.0;
    for (long long t = 1; t <= k - 1; ++t) {
        const double denom = -std::expm1(static_cast<double>(k - t + 1) * std::log1p(-p));
        const double rho = p / denom;
        std::vector<double> next(static_cast<size_t>(balls) + 1, 0.0);
        for (long long s = t - 1; s <= balls; ++s) {
            const double ps = prob[static_cast<size_t>(s)];
            if (ps == 0.0) continue;
            const long long free = balls - s;
            if (rho >= 1.0) {   // p == 1: every remaining ball takes the current bin
                if (free >= t - s) next[static_cast<size_t>(balls)] += ps;
                continue;
            }
            const double ratio = rho / (1.0 - rho);
            double pmf = std::pow(1.0 - rho, static_cast<double>(free));
            for (long long z = 0; z <= free; ++z) {
                if (z >= t - s) next[static_cast<size_t>(s + z)] += ps * pmf;
                pmf *= ratio * static_cast<double>(free - z) / static_cast<double>(z + 1);
            }
        }
        prob = std::move(next);
    }
    return prob[static_cast<size_t>(balls)];
}

// ---------------------------------------------------------------------------
// Exact conditioned law of M* = (C(k,2) - sum T_j) | TREE.
// ---------------------------------------------------------------------------

struct MStarDistribution {
    int k = 0;
    ExactRational p;
    ExactRational prob_tree;
    std::map<long long, ExactRational> mass;   // m -> Pr[M* = m]
};

inline MStarDistribution mstar_distribution(int k, const ExactRational& p, int k_cap = 30) {
    require_tilt(p);
    if (k < 2) throw std::domain_error("mstar_distribution: k must be >= 2");
    if (k > k_cap)
        throw cap_error("mstar_distribution: k = " + std::to_string(k) +
                        " exceeds exact-mode cap " + std::to_string(k_cap));
    const int balls = k - 1;
    const long long wmax = static_cast<long long>(balls) * (k - 1);
    // state[s][w]: s balls placed in bins <= t, with sum of i * z_i equal to w
    auto make_grid = [&]() {
        return std::vector<std::vector<ExactRational>>(
            static_cast<size_t>(balls) + 1,
            std::vector<ExactRational>(static_cast<size_t>(wmax) + 1));
    };
    auto state = make_grid();
    state[0][0] = 1;
    std::vector<ExactRational> rho_pow(static_cast<size_t>(balls) + 1);
    std::vector<ExactRational> rem_pow(static_cast<size_t>(balls) + 1);
    for (int t = 1; t <= k - 1; ++t) {
        const ExactRational rho = detail::bin_take_probability(k, p, t);
        const ExactRational rem = 1 - rho;
        rho_pow[0] = 1;
        rem_pow[0] = 1;
        for (int z = 1; z <= balls; ++z) {
            rho_pow[static_cast<size_t>(z)] = rho_pow[static_cast<size_t>(z - 1)] * rho;
            rem_pow[static_cast<size_t>(z)] = rem_pow[static_cast<size_t>(z - 1)] * rem;
        }
        auto next = make_grid();
        for (int s = t - 1; s <= balls; ++s) {
            const int free = balls - s;
            for (long long w = 0; w <= wmax; ++w) {
                const ExactRational& cur = state[static_cast<size_t>(s)][static_cast<size_t>(w)];
                if (cur == 0) continue;
                for (int z = std::max(0, t - s); z <= free; ++z) {
                    next[static_cast<size_t>(s + z)][static_cast<size_t>(w + static_cast<long long>(t) * z)] +=
                        cur * ExactInteger(binomial(free, z)) * rho_pow[static_cast<size_t>(z)] *
                        rem_pow[static_cast<size_t>(free - z)];
                }
            }
        }
        state = std::move(next);
    }

    MStarDistribution out;
    out.k = k;
    out.p = p;
    const long long pairs = CountTable::pair_count(k);
    for (long long w = 0; w <= wmax; ++w) {
        const ExactRational& v = state[static_cast<size_t>(balls)][static_cast<size_t>(w)];
        if (v == 0) continue;
        out.prob_tree += v;
        out.mass[pairs - w] += v;
    }
    for (auto& [m, q] : out.mass) q /= out.prob_tree;
    return out;
}

// ---------------------------------------------------------------------------
// The three factors and the exact product identity.
// ---------------------------------------------------------------------------

// A1 = (1-(1-p)^k)^{k-1}: every non-root vertex sees at least one head.
inline ExactRational a1(int k, const ExactRational& p) {
    require_tilt(p);
    return rational_pow(1 - rational_pow(1 - p, k), k - 1);
}

// A3 = Pr[BIN(M*, p) = l] under the conditioned law.
inline ExactRational a3_exact(const MStarDistribution& dist, long long l) {
    if (l < 0) throw std::domain_error("a3_exact: l must be >= 0");
    const ExactRational q = 1 - dist.p;
    ExactRational acc = 0;
    for (const auto& [m, mass] : dist.mass) {
        if (m < l) continue;
        acc += mass * ExactInteger(binomial(m, l)) * rational_pow(dist.p, l) *
               rational_pow(q, m - l);
    }
    return acc;
}

struct IdentityReport {
    int k = 0;
    long long l = 0;
    ExactRational p;
    ExactRational a1, a2, a3;
    ExactRational lhs, rhs;
    bool equal = false;
};

inline IdentityReport verify_identity(int k, long long l, const ExactRational& p,
                                      const CountTable& table, const MStarDistribution& dist) {
    require_tilt(p);
    if (k < 2) throw std::domain_error("verify_identity: k must be >= 2");
    if (l < 0 || l > CountTable::max_complexity(k))
        throw std::domain_error("verify_identity: l out of range");
    IdentityReport rep;
    rep.k = k;
    rep.l = l;
    rep.p = p;
    rep.a1 = a1(k, p);
    rep.a2 = dist.prob_tree;
    rep.a3 = a3_exact(dist, l);
    rep.lhs = rep.a1 * rep.a2 * rep.a3;
    const long long edges = k - 1 + l;
    rep.rhs = ExactRational(table.by_complexity(k, l)) * rational_pow(p, edges) *
              rational_pow(1 - p, CountTable::pair_count(k) - edges);
    rep.equal = rep.lhs == rep.rhs;
    return rep;
}

inline IdentityReport verify_identity(int k, long long l, const ExactRational& p,
                                      const CountTable& table) {
    return verify_identity(k, l, p, table, mstar_distribution(k, p));
}

// ---------------------------------------------------------------------------
// Brute-force oracle: enumerate all k^{k-1} ball placements.
// ---------------------------------------------------------------------------

struct BruteForceResult {
    ExactRational prob_tree;
    MStarDistribution dist;
};

inline BruteForceResult brute_force_joint(int k, const ExactRational& p) {
    require_tilt(p);
    if (k < 2) throw std::domain_error("brute_force_joint: k must be >= 2");
    if (k > 7) throw std::invalid_argument("brute_force_joint: k capped at 7");
    std::vector<ExactRational> weight(static_cast<size_t>(k) + 1);
    for (int i = 1; i <= k; ++i) weight[static_cast<size_t>(i)] = truncated_geometric_pmf(k, p, i);

    BruteForceResult out;
    out.dist.k = k;
    out.dist.p = p;
    std::vector<int> T(static_cast<size_t>(k - 1), 1);
    std::vector<int> Z(static_cast<size_t>(k));
    while (true) {
        std::fill(Z.begin(), Z.end(), 0);
        ExactRational w = 1;
        for (int t : T) {
            Z[static_cast<size_t>(t - 1)]++;
            w *= weight[static_cast<size_t>(t)];
        }
        const WalkTrace trace = walk_from_counts(Z);
        if (trace.tree) {
            out.prob_tree += w;
            out.dist.mass[trace.m_stat] += w;
        }
        int pos = 0;
        while (pos < k - 1 && T[static_cast<size_t>(pos)] == k) {
            T[static_cast<size_t>(pos)] = 1;
            ++pos;
        }
        if (pos == k - 1) break;
        T[static_cast<size_t>(pos)]++;
    }
    out.dist.prob_tree = out.prob_tree;
    for (auto& [m, q] : out.dist.mass) q /= out.prob_tree;
    return out;
}

// ---------------------------------------------------------------------------
// Escape fixed points for the Poisson walks.
// ---------------------------------------------------------------------------

// Survival probability of a branching process with Po(lambda) offspring:
// the unique root in (0,1) of e^{-lambda y} = 1 - y, or 0 when lambda <= 1.
inline double survival_probability(double lambda) {
    if (lambda <= 0) throw std::domain_error("survival_probability: lambda must be positive");
    if (lambda <= 1.0) return 0.0;
    auto g = [&](long double y) { return 1.0L - y - std::exp(-static_cast<long double>(lambda) * y); };
    long double lo = 1e-15L, hi = 1.0L - 1e-15L;
    if (g(hi) >= 0) return static_cast<double>(hi);   // root indistinguishable from 1
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (g(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    const long double y = 0.5L * (lo + hi);
    if (std::abs(g(y)) > 1e-12L)
        throw std::runtime_error("survival_probability: bisection failed to converge");
    return static_cast<double>(y);
}

// The downward walk with Po(1-eps) steps escapes with probability exactly eps;
// named so the simulation suite has a declared target.
inline double esc_right_probability(double eps) {
    if (eps <= 0 || eps >= 1) throw std::domain_error("esc_right_probability: eps must lie in (0,1)");
    return eps;
}

}
