#pragma once

#include "census/errors.hpp"
#include "census/exact.hpp"

#include <string>
#include <vector>

namespace census {

// Exact counts of labeled connected graphs by vertex count n and edge count m,
// built from the subtract-disconnected recurrence on the component containing
// vertex 1:
//
//   binom(C(n,2), m) = sum_{j=1..n} binom(n-1, j-1) sum_i C(j,i) binom(C(n-j,2), m-i)
//
// solved for C(n, m).  Rows are memoized up to the configured caps; columns are
// capped at max_edges, which is safe because the recurrence for column m only
// consults columns <= m.
class CountTable {
public:
    CountTable(int max_vertices, long long max_edges)
        : max_vertices_(max_vertices), max_edges_(max_edges) {
        if (max_vertices < 1) throw std::domain_error("CountTable: max_vertices must be >= 1");
        if (max_edges < 0) throw std::domain_error("CountTable: max_edges must be >= 0");
        build();
    }

    static long long pair_count(long long n) { return n * (n - 1) / 2; }

    // Complexity of the complete graph: C(k,2) - k + 1 for k >= 2, else 0.
    static long long max_complexity(long long k) {
        return k >= 2 ? pair_count(k) - k + 1 : 0;
    }

    // Number of labeled connected graphs on n vertices with m edges.
    // Zero outside [n-1, C(n,2)]; cap_error when (n, m) lies beyond the table.
    const ExactInteger& connected(int n, long long m) const {
        if (n < 1) throw std::domain_error("CountTable::connected: n must be >= 1");
        if (n == 1) return m == 0 ? one() : zero();
        if (m < n - 1 || m > pair_count(n)) return zero();
        if (n > max_vertices_)
            throw cap_error("CountTable: n = " + std::to_string(n) + " exceeds max_vertices = " +
                            std::to_string(max_vertices_));
        if (m > max_edges_)
            throw cap_error("CountTable: m = " + std::to_string(m) + " exceeds max_edges = " +
                            std::to_string(max_edges_));
        return rows_[static_cast<size_t>(n)][static_cast<size_t>(m)];
    }

    // Count by complexity l (edges = k - 1 + l); zero for l < 0 or l too large.
    const ExactInteger& by_complexity(int k, long long l) const {
        if (l < 0 || (k >= 2 && l > max_complexity(k))) return zero();
        return connected(k, k - 1 + l);
    }

    int max_vertices() const { return max_vertices_; }
    long long max_edges() const { return max_edges_; }

private:
    static const ExactInteger& zero() {
        static const ExactInteger z(0);
        return z;
    }
    static const ExactInteger& one() {
        static const ExactInteger o(1);
        return o;
    }

    void build() {
        const int N = max_vertices_;
        // all_graphs[r][t] = binom(C(r,2), t), computed incrementally along t
        std::vector<std::vector<ExactInteger>> all_graphs(static_cast<size_t>(N) + 1);
        for (int r = 0; r <= N; ++r) {
            const long long top = std::min(pair_count(r), max_edges_);
            auto& row = all_graphs[static_cast<size_t>(r)];
            row.resize(static_cast<size_t>(top) + 1);
            row[0] = 1;
            const long long A = pair_count(r);
            for (long long t = 1; t <= top; ++t) {
                row[static_cast<size_t>(t)] = row[static_cast<size_t>(t - 1)] * (A - t + 1) / t;
            }
        }

        rows_.resize(static_cast<size_t>(N) + 1);
        rows_[1] = {ExactInteger(1)};
        for (int n = 2; n <= N; ++n) {
            // pascal[j] = binom(n-1, j-1): ways to pick the rest of vertex 1's component
            std::vector<ExactInteger> pascal(static_cast<size_t>(n), 0);
            for (int j = 1; j <= n - 1; ++j) pascal[static_cast<size_t>(j)] = binomial(n - 1, j - 1);

            const long long top = std::min(pair_count(n), max_edges_);
            auto& row = rows_[static_cast<size_t>(n)];
            row.assign(static_cast<size_t>(top) + 1, ExactInteger(0));
            for (long long m = n - 1; m <= top; ++m) {
                ExactInteger total = all_graphs[static_cast<size_t>(n)][static_cast<size_t>(m)];
                for (int j = 1; j <= n - 1; ++j) {
                    const auto& comp = rows_[static_cast<size_t>(j)];
                    const auto& rest = all_graphs[static_cast<size_t>(n - j)];
                    const long long rest_top = static_cast<long long>(rest.size()) - 1;
                    const long long ilo = std::max<long long>(j - 1, m - rest_top);
                    const long long ihi = std::min<long long>(static_cast<long long>(comp.size()) - 1, m);
                    ExactInteger sub = 0;
                    for (long long i = ilo; i <= ihi; ++i) {
                        if (comp[static_cast<size_t>(i)] == 0) continue;
                        sub += comp[static_cast<size_t>(i)] * rest[static_cast<size_t>(m - i)];
                    }
                    total -= pascal[static_cast<size_t>(j)] * sub;
                }
                row[static_cast<size_t>(m)] = total;
            }
        }
    }

    int max_vertices_;
    long long max_edges_;
    std::vector<std::vector<ExactInteger>> rows_;
};

}
