#pragma once

#include "census/count_table.hpp"
#include "census/errors.hpp"
#include "census/exact.hpp"
#include "census/rng.hpp"
#include "census/stats.hpp"
#include "census/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace census {

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long n = 0;
    long long accepted = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

namespace detail {

inline unsigned clamp_workers(unsigned workers) { return workers == 0 ? 1u : workers; }

inline long long worker_quota(long long n, unsigned workers, unsigned w) {
    const auto W = static_cast<long long>(workers);
    return n / W + (static_cast<long long>(w) < n % W ? 1 : 0);
}

}

// Walker/Vose alias table over values 0..size-1 for O(1) discrete draws.
class DiscreteAlias {
  public:
    explicit DiscreteAlias(const std::vector<double>& weights) {
        const size_t n = weights.size();
        if (n == 0) throw std::invalid_argument("DiscreteAlias: empty weight vector");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0)) throw std::invalid_argument("DiscreteAlias: weights must be >= 0");
            total += w;
        }
        if (!(total > 0)) throw std::invalid_argument("DiscreteAlias: total weight must be positive");
        prob_.resize(n);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small, large;
        for (size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t g = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = g;
            scaled[g] -= 1.0 - scaled[s];
            if (scaled[g] < 1.0) {
                large.pop_back();
                small.push_back(g);
            }
        }
        for (std::uint32_t i : large) prob_[i] = 1.0;
        for (std::uint32_t i : small) prob_[i] = 1.0;   // residue from roundoff
    }

    std::uint32_t sample(SplitMix64& rng) const {
        const auto idx = static_cast<std::uint32_t>(rng.next() % prob_.size());
        return rng.next_double() < prob_[idx] ? idx : alias_[idx];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

// Draws the ball destinations T in [1,k] under the tilted truncated geometric.
class TiltedBallSampler {
  public:
    TiltedBallSampler(int k, double p) : k_(k), table_(make_weights(k, p)) {
        if (k < 2) throw std::domain_error("TiltedBallSampler: k must be >= 2");
    }

    int k() const { return k_; }
    int sample(SplitMix64& rng) const { return static_cast<int>(table_.sample(rng)) + 1; }

  private:
    static std::vector<double> make_weights(int k, double p) {
        if (!(p > 0) || p > 1) throw std::domain_error("TiltedBallSampler: p must lie in (0,1]");
        std::vector<double> w(static_cast<size_t>(k));
        double geom = p;
        for (int i = 0; i < k; ++i) {
            w[static_cast<size_t>(i)] = geom;
            geom *= 1.0 - p;
        }
        return w;
    }

    int k_;
    DiscreteAlias table_;
};

struct PlacementDraw {
    bool tree = false;
    long long m = 0;   // C(k,2) - sum of destinations
};

// One balls-into-bins experiment: k-1 tilted draws, queue walk, excess.
inline PlacementDraw draw_placement(const TiltedBallSampler& sampler, SplitMix64& rng,
                                    std::vector<int>& bins) {
    const int k = sampler.k();
    bins.assign(static_cast<size_t>(k) + 1, 0);
    long long sum_t = 0;
    for (int j = 0; j < k - 1; ++j) {
        const int t = sampler.sample(rng);
        bins[static_cast<size_t>(t)]++;
        sum_t += t;
    }
    PlacementDraw draw;
    draw.tree = true;
    long long y = 1;
    for (int i = 1; i <= k - 1; ++i) {
        y += bins[static_cast<size_t>(i)] - 1;
        if (y <= 0) {
            draw.tree = false;
            break;
        }
    }
    draw.m = CountTable::pair_count(k) - sum_t;
    return draw;
}

// ---------------------------------------------------------------------------
// Estimators.  Work is split across workers with independent derived streams
// and merged in worker order, so results depend only on (seed, workers).
// ---------------------------------------------------------------------------

inline McEstimate estimate_prob_tree(int k, double p, long long n, std::uint64_t seed,
                                     unsigned workers = 1) {
    workers = detail::clamp_workers(workers);
    if (n <= 0) throw std::invalid_argument("estimate_prob_tree: n must be positive");
    const TiltedBallSampler sampler(k, p);
    std::vector<long long> hits(workers, 0);
    auto run = [&](unsigned w) {
        SplitMix64 rng = derive_stream(seed, w);
        std::vector<int> bins;
        const long long quota = detail::worker_quota(n, workers, w);
        long long local = 0;
        for (long long i = 0; i < quota; ++i)
            if (draw_placement(sampler, rng, bins).tree) ++local;
        hits[w] = local;
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& th : pool) th.join();

    long long total = 0;
    for (long long h : hits) total += h;
    McEstimate est;
    est.mean = static_cast<double>(total) / static_cast<double>(n);
    est.stderr_ = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
    est.n = n;
    est.accepted = total;
    est.seed = seed;
    est.workers = workers;
    return est;
}

// Upward walk: Y_0 = 1, steps Po(lambda) - 1; success = staying positive for L
// steps.  Once Y exceeds the remaining horizon the walk cannot die (steps drop
// by at most one), so the sample resolves early.
inline McEstimate estimate_esc_left(double lambda, long long horizon, long long n,
                                    std::uint64_t seed, unsigned workers = 1) {
    workers = detail::clamp_workers(workers);
    if (horizon <= 0) throw std::invalid_argument("estimate_esc_left: horizon must be positive");
    if (n <= 0) throw std::invalid_argument("estimate_esc_left: n must be positive");
    std::vector<long long> hits(workers, 0);
    auto run = [&](unsigned w) {
        SplitMix64 rng = derive_stream(seed, w);
        const long long quota = detail::worker_quota(n, workers, w);
        long long local = 0;
        for (long long i = 0; i < quota; ++i) {
            long long y = 1;
            bool alive = true;
            for (long long step = 1; step <= horizon; ++step) {
                y += poisson_sample(lambda, rng) - 1;
                if (y <= 0) {
                    alive = false;
                    break;
                }
                if (y > horizon - step) break;
            }
            if (alive) ++local;
        }
        hits[w] = local;
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& th : pool) th.join();

    long long total = 0;
    for (long long h : hits) total += h;
    McEstimate est;
    est.mean = static_cast<double>(total) / static_cast<double>(n);
    est.stderr_ = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
    est.n = n;
    est.accepted = total;
    est.seed = seed;
    est.workers = workers;
    return est;
}

// Downward walk: Y_0 = 0, steps 1 - Po(lambda_r); success = staying positive
// through L steps.  Steps can drop arbitrarily far, so every step is played.
inline McEstimate estimate_esc_right(double lambda_r, long long horizon, long long n,
                                     std::uint64_t seed, unsigned workers = 1) {
    workers = detail::clamp_workers(workers);
    if (horizon <= 0) throw std::invalid_argument("estimate_esc_right: horizon must be positive");
    if (n <= 0) throw std::invalid_argument("estimate_esc_right: n must be positive");
    std::vector<long long> hits(workers, 0);
    auto run = [&](unsigned w) {
        SplitMix64 rng = derive_stream(seed, w);
        const long long quota = detail::worker_quota(n, workers, w);
        long long local = 0;
        for (long long i = 0; i < quota; ++i) {
            long long y = 0;
            bool alive = true;
            for (long long step = 1; step <= horizon; ++step) {
                y += 1 - poisson_sample(lambda_r, rng);
                if (y <= 0) {
                    alive = false;
                    break;
                }
            }
            if (alive) ++local;
        }
        hits[w] = local;
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& th : pool) th.join();

    long long total = 0;
    for (long long h : hits) total += h;
    McEstimate est;
    est.mean = static_cast<double>(total) / static_cast<double>(n);
    est.stderr_ = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
    est.n = n;
    est.accepted = total;
    est.seed = seed;
    est.workers = workers;
    return est;
}

namespace detail {

// Acceptance-rate pilot on its own stream (index `workers`, past all worker
// streams).  Refuses to start an open-ended accept loop that cannot finish.
inline void require_viable_acceptance(const TiltedBallSampler& sampler, std::uint64_t seed,
                                      unsigned workers, const char* caller) {
    SplitMix64 rng = derive_stream(seed, workers);
    std::vector<int> bins;
    const long long pilot_n = 10000;
    long long accepted = 0;
    for (long long i = 0; i < pilot_n; ++i)
        if (draw_placement(sampler, rng, bins).tree) ++accepted;
    const double rate = static_cast<double>(accepted) / static_cast<double>(pilot_n);
    if (rate < 1e-3)
        throw budget_error(std::string(caller) + ": pilot acceptance rate " +
                           std::to_string(rate) + " below 1e-3; refusing to run");
}

// Largest integer M with M <= mu + u*sigma, decided by exact rational
// comparison (sigma enters only through sigma^2).
inline long long exact_threshold(const ExactRational& mu, const ExactRational& sigma2, double u,
                                 double mu_d, double sigma_d) {
    const ExactRational u2s2 = rational_from_double(u) * rational_from_double(u) * sigma2;
    auto below = [&](long long M) {
        const ExactRational d = ExactRational(M) - mu;
        if (u >= 0) return d <= 0 || d * d <= u2s2;
        return d < 0 && d * d >= u2s2;
    };
    long long M = static_cast<long long>(std::floor(mu_d + u * sigma_d));
    while (below(M + 1)) ++M;
    while (!below(M)) --M;
    return M;
}

}

struct CltReport {
    int k = 0;
    double p = 0.0;
    std::vector<double> u_grid;
    std::vector<double> empirical;
    std::vector<double> gaussian;
    double max_abs_dev = 0.0;
    long long accepted = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

// Empirical CDF of the conditioned excess at exact standardized cutpoints
// floor(mu + u*sigma) against the Gaussian limit.
inline CltReport sample_mstar_clt(int k, const ExactRational& p, long long n_accepted,
                                  const std::vector<double>& u_grid, std::uint64_t seed,
                                  unsigned workers = 1) {
    workers = detail::clamp_workers(workers);
    require_tilt(p);
    if (k < 2) throw std::domain_error("sample_mstar_clt: k must be >= 2");
    if (n_accepted <= 0) throw std::invalid_argument("sample_mstar_clt: need a positive target");
    if (u_grid.empty()) throw std::invalid_argument("sample_mstar_clt: empty u grid");

    const double p_d = p.convert_to<double>();
    const TiltedBallSampler sampler(k, p_d);
    detail::require_viable_acceptance(sampler, seed, workers, "sample_mstar_clt");

    const ExactRational mu = mean_m(k, p);
    const ExactRational sigma2 = var_m(k, p);
    const double mu_d = mu.convert_to<double>();
    const double sigma_d = std::sqrt(sigma2.convert_to<double>());
    std::vector<long long> cuts;
    cuts.reserve(u_grid.size());
    for (double u : u_grid) cuts.push_back(detail::exact_threshold(mu, sigma2, u, mu_d, sigma_d));

    std::vector<std::vector<long long>> counts(workers,
                                               std::vector<long long>(u_grid.size(), 0));
    auto run = [&](unsigned w) {
        SplitMix64 rng = derive_stream(seed, w);
        std::vector<int> bins;
        const long long quota = detail::worker_quota(n_accepted, workers, w);
        long long got = 0;
        while (got < quota) {
            const PlacementDraw draw = draw_placement(sampler, rng, bins);
            if (!draw.tree) continue;
            ++got;
            for (size_t j = 0; j < cuts.size(); ++j)
                if (draw.m <= cuts[j]) ++counts[w][j];
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& th : pool) th.join();

    CltReport report;
    report.k = k;
    report.p = p_d;
    report.u_grid = u_grid;
    report.empirical.resize(u_grid.size());
    report.gaussian.resize(u_grid.size());
    report.accepted = n_accepted;
    report.seed = seed;
    report.workers = workers;
    for (size_t j = 0; j < u_grid.size(); ++j) {
        long long total = 0;
        for (unsigned w = 0; w < workers; ++w) total += counts[w][j];
        report.empirical[j] = static_cast<double>(total) / static_cast<double>(n_accepted);
        report.gaussian[j] = normal_cdf(u_grid[j]);
        report.max_abs_dev =
            std::max(report.max_abs_dev, std::abs(report.empirical[j] - report.gaussian[j]));
    }
    return report;
}

// Rao-Blackwellized estimate of Pr[BIN(M*, p) = l]: average the binomial pmf
// at the sampled conditioned excess instead of flipping the coins.
inline McEstimate estimate_a3(int k, double p, long long l, long long n, std::uint64_t seed,
                              unsigned workers = 1) {
    workers = detail::clamp_workers(workers);
    if (l < 0) throw std::domain_error("estimate_a3: l must be >= 0");
    if (n <= 0) throw std::invalid_argument("estimate_a3: n must be positive");
    const TiltedBallSampler sampler(k, p);
    detail::require_viable_acceptance(sampler, seed, workers, "estimate_a3");

    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lg_l = std::lgamma(static_cast<double>(l) + 1.0);
    struct Tally {
        long long accepted = 0;
        double sum = 0.0, sum_sq = 0.0;
    };
    std::vector<Tally> tallies(workers);
    auto run = [&](unsigned w) {
        SplitMix64 rng = derive_stream(seed, w);
        std::vector<int> bins;
        const long long quota = detail::worker_quota(n, workers, w);
        Tally local;
        for (long long i = 0; i < quota; ++i) {
            const PlacementDraw draw = draw_placement(sampler, rng, bins);
            if (!draw.tree) continue;
            ++local.accepted;
            double weight = 0.0;
            if (draw.m >= l) {
                const double md = static_cast<double>(draw.m);
                weight = std::exp(static_cast<double>(l) * log_p +
                                  static_cast<double>(draw.m - l) * log_q +
                                  std::lgamma(md + 1.0) - lg_l -
                                  std::lgamma(md - static_cast<double>(l) + 1.0));
            }
            local.sum += weight;
            local.sum_sq += weight * weight;
        }
        tallies[w] = local;
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& th : pool) th.join();

    Tally total;
    for (const Tally& t : tallies) {
        total.accepted += t.accepted;
        total.sum += t.sum;
        total.sum_sq += t.sum_sq;
    }
    if (total.accepted == 0)
        throw budget_error("estimate_a3: no accepted samples despite viable pilot");
    McEstimate est;
    const auto acc = static_cast<double>(total.accepted);
    est.mean = total.sum / acc;
    const double var = total.accepted > 1
                           ? std::max(0.0, (total.sum_sq - total.sum * total.sum / acc) / (acc - 1.0))
                           : 0.0;
    est.stderr_ = std::sqrt(var / acc);
    est.n = n;
    est.accepted = total.accepted;
    est.seed = seed;
    est.workers = workers;
    return est;
}

}
