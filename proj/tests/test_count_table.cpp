#include "census/count_table.hpp"
#include "census/exact.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <numeric>
#include <vector>

using census::CountTable;
using census::ExactInteger;

namespace {

// Independent oracle: enumerate every graph on n labeled vertices and count
// the connected ones by edge count.
std::vector<long long> brute_force_connected_by_edges(int n) {
    const int pairs = static_cast<int>(CountTable::pair_count(n));
    std::vector<std::pair<int, int>> pair_list;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pair_list.emplace_back(a, b);
    std::vector<long long> counts(static_cast<size_t>(pairs) + 1, 0);
    std::vector<int> parent(static_cast<size_t>(n));
    std::function<int(int)> find = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v) {
            parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            v = parent[static_cast<size_t>(v)];
        }
        return v;
    };
    for (unsigned long mask = 0; mask < (1UL << pairs); ++mask) {
        std::iota(parent.begin(), parent.end(), 0);
        int components = n, edges = 0;
        for (int e = 0; e < pairs; ++e) {
            if (!(mask & (1UL << e))) continue;
            ++edges;
            const int ra = find(pair_list[static_cast<size_t>(e)].first);
            const int rb = find(pair_list[static_cast<size_t>(e)].second);
            if (ra != rb) {
                parent[static_cast<size_t>(ra)] = rb;
                --components;
            }
        }
        if (components == 1) ++counts[static_cast<size_t>(edges)];
    }
    return counts;
}

}

TEST_CASE("static helpers") {
    CHECK(CountTable::pair_count(2) == 1);
    CHECK(CountTable::pair_count(100) == 4950);
    CHECK(CountTable::max_complexity(1) == 0);
    CHECK(CountTable::max_complexity(2) == 0);
    CHECK(CountTable::max_complexity(3) == 1);
    CHECK(CountTable::max_complexity(10) == 36);
}

TEST_CASE("single vertex and out-of-range queries") {
    const CountTable table(6, 15);
    CHECK(table.connected(1, 0) == 1);
    CHECK(table.connected(1, 3) == 0);
    CHECK(table.connected(4, 2) == 0);    // below spanning-tree edge count
    CHECK(table.connected(4, 7) == 0);    // above complete graph
    CHECK(table.by_complexity(4, -1) == 0);
    CHECK(table.by_complexity(4, 4) == 0);
    CHECK_THROWS_AS(table.connected(7, 6), census::cap_error);
    CHECK(table.connected(5, 16) == 0);   // structurally impossible, not a cap miss

    const CountTable truncated(6, 7);
    CHECK_THROWS_AS(truncated.connected(6, 9), census::cap_error);
}

TEST_CASE("trees follow the k^(k-2) law") {
    const CountTable table(50, 49);
    for (int n = 1; n <= 50; ++n) {
        CHECK(table.connected(n, n - 1) ==
              census::integer_pow(ExactInteger(n), n >= 2 ? static_cast<unsigned long long>(n - 2) : 0));
    }
}

TEST_CASE("k = 4 row by complexity") {
    const CountTable table(4, 6);
    CHECK(table.by_complexity(4, 0) == 16);
    CHECK(table.by_complexity(4, 1) == 15);
    CHECK(table.by_complexity(4, 2) == 6);
    CHECK(table.by_complexity(4, 3) == 1);
    ExactInteger row_sum = 0;
    for (long long m = 0; m <= 6; ++m) row_sum += table.connected(4, m);
    CHECK(row_sum == 38);
}

TEST_CASE("row sums match the count of connected graphs") {
    const CountTable table(6, 15);
    const std::vector<ExactInteger> expected = {0, 1, 1, 4, 38, 728, 26704};
    for (int n = 1; n <= 6; ++n) {
        ExactInteger row_sum = 0;
        for (long long m = 0; m <= CountTable::pair_count(n); ++m) row_sum += table.connected(n, m);
        CHECK(row_sum == expected[static_cast<size_t>(n)]);
    }
}

TEST_CASE("full rows equal brute-force enumeration up to n = 6") {
    const CountTable table(6, 15);
    for (int n = 2; n <= 6; ++n) {
        const std::vector<long long> brute = brute_force_connected_by_edges(n);
        for (long long m = 0; m <= CountTable::pair_count(n); ++m) {
            INFO("n = " << n << ", m = " << m);
            CHECK(table.connected(n, m) == brute[static_cast<size_t>(m)]);
        }
    }
}

TEST_CASE("edge cap truncates columns without corrupting the kept ones") {
    const CountTable capped(6, 7);
    const CountTable full(6, 15);
    for (int n = 2; n <= 6; ++n)
        for (long long m = 0; m <= 7; ++m) CHECK(capped.connected(n, m) == full.connected(n, m));
}
