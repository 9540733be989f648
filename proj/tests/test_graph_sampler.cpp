#include "census/count_table.hpp"
#include "census/graph_sampler.hpp"
#include "census/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace {

// Canonical key: sorted list of sorted endpoint pairs.
std::vector<std::pair<int, int>> canonical(const census::LabeledGraph& g) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(g.edges.size());
    for (auto [a, b] : g.edges) edges.emplace_back(std::min(a, b), std::max(a, b));
    std::sort(edges.begin(), edges.end());
    return edges;
}

}

TEST_CASE("degenerate sizes") {
    census::SamplerOptions options;
    const census::SampleResult one = census::sample_connected_graph(1, 0, options, 5ULL);
    CHECK(one.graph.k == 1);
    CHECK(one.graph.edges.empty());
    CHECK(census::is_connected(one.graph));

    const census::SampleResult two = census::sample_connected_graph(2, 0, options, 5ULL);
    REQUIRE(two.graph.edges.size() == 1);
    CHECK(canonical(two.graph) == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("samples are well-formed graphs of the requested complexity") {
    census::SamplerOptions options;
    census::SplitMix64 rng = census::derive_stream(99, 0);
    for (int k : {4, 7}) {
        for (long long l = 0; l <= std::min<long long>(3, census::CountTable::max_complexity(k));
             ++l) {
            for (int rep = 0; rep < 200; ++rep) {
                const census::SampleResult res =
                    census::sample_connected_graph(k, l, options, rng);
                const auto edges = canonical(res.graph);
                REQUIRE(edges.size() == static_cast<size_t>(k - 1 + l));
                // No self-loops, endpoints in range, no duplicate edges.
                for (const auto& [a, b] : edges) {
                    REQUIRE(a >= 0);
                    REQUIRE(b < k);
                    REQUIRE(a < b);
                }
                REQUIRE(std::adjacent_find(edges.begin(), edges.end()) == edges.end());
                REQUIRE(census::is_connected(res.graph));
            }
        }
    }
}

TEST_CASE("same seed reproduces the same graphs") {
    census::SamplerOptions options;
    census::SplitMix64 a = census::derive_stream(1234, 0);
    census::SplitMix64 b = census::derive_stream(1234, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto ga = census::sample_connected_graph(6, 2, options, a);
        const auto gb = census::sample_connected_graph(6, 2, options, b);
        CHECK(ga.graph.edges == gb.graph.edges);
        CHECK(ga.trials == gb.trials);
    }
}

TEST_CASE("maximum complexity forces the complete graph") {
    census::SamplerOptions options;
    const long long l_max = census::CountTable::max_complexity(5);
    const census::SampleResult res = census::sample_connected_graph(5, l_max, options, 7ULL);
    CHECK(res.tilt == 1.0);
    CHECK(res.trials == 1);
    CHECK(res.graph.edges.size() == 10);
    CHECK(census::is_connected(res.graph));
}

TEST_CASE("all labeled trees on four vertices appear uniformly") {
    census::SamplerOptions options;
    census::SplitMix64 rng = census::derive_stream(2026'08'15, 0);
    std::map<std::vector<std::pair<int, int>>, long long> hist;
    const long long n = 32000;
    for (long long i = 0; i < n; ++i)
        ++hist[canonical(census::sample_connected_graph(4, 0, options, rng).graph)];
    REQUIRE(hist.size() == 16);   // Cayley: 4^2 labeled trees
    const double expected = static_cast<double>(n) / 16.0;
    double statistic = 0.0;
    for (const auto& [key, count] : hist) {
        const double diff = static_cast<double>(count) - expected;
        statistic += diff * diff / expected;
    }
    CHECK(census::chi_square_pvalue(statistic, 15) > 1e-4);
}

TEST_CASE("unicyclic graphs on four vertices cover all fifteen shapes") {
    census::SamplerOptions options;
    census::SplitMix64 rng = census::derive_stream(31337, 0);
    std::set<std::vector<std::pair<int, int>>> support;
    for (long long i = 0; i < 4000; ++i)
        support.insert(canonical(census::sample_connected_graph(4, 1, options, rng).graph));
    CHECK(support.size() == 15);
}

TEST_CASE("tilt override changes nothing about the law's support") {
    census::SamplerOptions options;
    options.tilt = 0.3;
    census::SplitMix64 rng = census::derive_stream(4242, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto res = census::sample_connected_graph(5, 1, options, rng);
        CHECK(res.tilt == 0.3);
        CHECK(res.graph.edges.size() == 5);
        CHECK(census::is_connected(res.graph));
    }
}

TEST_CASE("argument validation and budget") {
    census::SamplerOptions options;
    CHECK_THROWS_AS(census::sample_connected_graph(0, 0, options, 1ULL), std::domain_error);
    CHECK_THROWS_AS(census::sample_connected_graph(4, -1, options, 1ULL), std::domain_error);
    CHECK_THROWS_AS(census::sample_connected_graph(4, 4, options, 1ULL), std::domain_error);
    options.tilt = 1.5;
    CHECK_THROWS_AS(census::sample_connected_graph(4, 1, options, 1ULL), std::domain_error);

    census::SamplerOptions tiny;
    tiny.max_trials = 1;
    tiny.tilt = 0.01;   // surplus target 30 is hopeless in one trial at this tilt
    CHECK_THROWS_AS(census::sample_connected_graph(20, 30, tiny, 123ULL),
                    census::budget_error);
}
