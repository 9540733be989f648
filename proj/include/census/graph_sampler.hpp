#pragma once

#include "census/count_table.hpp"
#include "census/errors.hpp"
#include "census/montecarlo.hpp"
#include "census/rng.hpp"
#include "census/tilt.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace census {

struct LabeledGraph {
    int k = 0;
    std::vector<std::pair<int, int>> edges;
};

inline bool is_connected(const LabeledGraph& g) {
    if (g.k <= 0) return false;
    std::vector<std::vector<int>> adj(static_cast<size_t>(g.k));
    for (const auto& [a, b] : g.edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    std::vector<char> seen(static_cast<size_t>(g.k), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj[static_cast<size_t>(v)]) {
            if (!seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = 1;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == g.k;
}

struct SamplerOptions {
    double tilt = 0.0;              // <= 0 selects the default tilt for (k, l)
    long long max_trials = 10'000'000;
};

struct SampleResult {
    LabeledGraph graph;
    long long trials = 0;
    double tilt = 0.0;
};

// Tilt that keeps the per-trial acceptance probability polynomial in k: match
// the expected surplus to l, or keep the surplus budget near zero for trees.
inline double default_sampler_tilt(int k, long long l) {
    if (l >= 1) return static_cast<double>(solve_tilt(k, static_cast<double>(l)));
    if (k <= 10) return 0.5;
    return std::pow(static_cast<double>(k), -1.5);
}

// Uniform sample from connected graphs on k labeled vertices with k-1+l
// edges.  Each trial replays the queue exploration: vertex v joins at stage
// T_v, the stage-t pop examines every discovered-but-unpopped vertex with an
// independent tilted coin, and the trial is kept iff exactly l coins land
// heads.  Every accepted outcome reproduces one graph, with a probability
// independent of which graph it is.
inline SampleResult sample_connected_graph(int k, long long l, const SamplerOptions& options,
                                           SplitMix64& rng) {
    if (k < 1) throw std::domain_error("sample_connected_graph: k must be >= 1");
    if (l < 0 || l > CountTable::max_complexity(k))
        throw std::domain_error("sample_connected_graph: l out of range for k = " +
                                std::to_string(k));
    SampleResult result;
    result.graph.k = k;
    result.tilt = options.tilt > 0 ? options.tilt : default_sampler_tilt(k, l);
    if (k == 1) {
        result.trials = 1;
        return result;
    }
    const double p = result.tilt;
    if (p > 1.0) throw std::domain_error("sample_connected_graph: tilt must lie in (0,1]");
    const TiltedBallSampler sampler(k, p);

    std::vector<int> stage(static_cast<size_t>(k), 0);        // stage[v] = T_v
    std::vector<int> bins(static_cast<size_t>(k) + 1, 0);
    std::vector<int> stage_head(static_cast<size_t>(k), -1);  // per-stage label lists
    std::vector<int> stage_next(static_cast<size_t>(k), -1);
    std::vector<int> order;
    order.reserve(static_cast<size_t>(k));
    std::vector<std::pair<int, int>> edges;

    for (long long trial = 1; trial <= options.max_trials; ++trial) {
        std::fill(bins.begin(), bins.end(), 0);
        long long sum_t = 0;
        for (int v = 1; v < k; ++v) {
            const int t = sampler.sample(rng);
            stage[static_cast<size_t>(v)] = t;
            bins[static_cast<size_t>(t)]++;
            sum_t += t;
        }
        long long y = 1;
        bool tree = true;
        for (int i = 1; i <= k - 1; ++i) {
            y += bins[static_cast<size_t>(i)] - 1;
            if (y <= 0) {
                tree = false;
                break;
            }
        }
        if (!tree) continue;

        // Bucket vertex labels by stage, preserving ascending label order
        // within each stage (lists are built back-to-front).
        std::fill(stage_head.begin(), stage_head.end(), -1);
        for (int v = k - 1; v >= 1; --v) {
            const int t = stage[static_cast<size_t>(v)];
            stage_next[static_cast<size_t>(v)] = stage_head[static_cast<size_t>(t)];
            stage_head[static_cast<size_t>(t)] = v;
        }

        order.clear();
        order.push_back(0);
        edges.clear();
        long long heads = 0, eligible_total = 0;
        for (int t = 1; t <= k - 1; ++t) {
            const int popped = order[static_cast<size_t>(t - 1)];
            eligible_total += static_cast<long long>(order.size()) - t;
            for (size_t j = static_cast<size_t>(t); j < order.size(); ++j) {
                if (rng.next_double() < p) {
                    ++heads;
                    edges.emplace_back(popped, order[j]);
                }
            }
            for (int v = stage_head[static_cast<size_t>(t)]; v != -1;
                 v = stage_next[static_cast<size_t>(v)]) {
                edges.emplace_back(popped, v);
                order.push_back(v);
            }
        }
        if (eligible_total != CountTable::pair_count(k) - sum_t)
            throw std::logic_error("sample_connected_graph: surplus accounting mismatch");
        if (heads != l) continue;

        result.graph.edges = edges;
        result.trials = trial;
        return result;
    }
    throw budget_error("sample_connected_graph: no acceptance within " +
                       std::to_string(options.max_trials) + " trials");
}

inline SampleResult sample_connected_graph(int k, long long l, const SamplerOptions& options,
                                           std::uint64_t seed) {
    SplitMix64 rng = derive_stream(seed, 0);
    return sample_connected_graph(k, l, options, rng);
}

}
