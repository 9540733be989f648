#include "census/count_table.hpp"
#include "census/tilt.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using census::ExactRational;

namespace {
const std::vector<ExactRational> p_grid = {ExactRational(1, 4), ExactRational(1, 3),
                                           ExactRational(1, 2), ExactRational(7, 9),
                                           ExactRational(1)};
}

TEST_CASE("truncated geometric pmf") {
    CHECK(census::truncated_geometric_pmf(3, ExactRational(1, 2), 1) == ExactRational(4, 7));
    CHECK(census::truncated_geometric_pmf(3, ExactRational(1, 2), 2) == ExactRational(2, 7));
    CHECK(census::truncated_geometric_pmf(3, ExactRational(1, 2), 3) == ExactRational(1, 7));
    CHECK_THROWS_AS(census::truncated_geometric_pmf(3, ExactRational(1, 2), 0),
                    std::domain_error);
    CHECK_THROWS_AS(census::truncated_geometric_pmf(3, ExactRational(1, 2), 4),
                    std::domain_error);
    CHECK_THROWS_AS(census::truncated_geometric_pmf(3, ExactRational(0), 1), std::domain_error);
    CHECK_THROWS_AS(census::truncated_geometric_pmf(3, ExactRational(3, 2), 1),
                    std::domain_error);

    for (int k = 2; k <= 8; ++k) {
        for (const auto& p : p_grid) {
            ExactRational total = 0;
            for (int i = 1; i <= k; ++i) total += census::truncated_geometric_pmf(k, p, i);
            CHECK(total == 1);
        }
    }
}

TEST_CASE("closed-form moments equal summation") {
    CHECK(census::trunc_geom_mean(3, ExactRational(1, 2)) == ExactRational(11, 7));
    CHECK(census::trunc_geom_second_moment(3, ExactRational(1, 2)) == 3);
    for (int k = 2; k <= 8; ++k) {
        for (const auto& p : p_grid) {
            CHECK(census::trunc_geom_mean(k, p) == census::trunc_geom_mean_by_summation(k, p));
            CHECK(census::trunc_geom_second_moment(k, p) ==
                  census::trunc_geom_second_by_summation(k, p));
        }
    }
}

TEST_CASE("excess mean and variance") {
    CHECK(census::mean_m(3, ExactRational(1, 2)) == ExactRational(-1, 7));
    CHECK(census::var_m(3, ExactRational(1, 2)) == ExactRational(52, 49));
    for (int k = 2; k <= 8; ++k) {
        for (const auto& p : p_grid) {
            CHECK(census::mean_m(k, p) == census::mean_m_by_summation(k, p));
            if (p != 1)   // the compact form divides by 1 - q^k with q = 0 otherwise
                CHECK(census::mean_m(k, p) == census::mean_m_compact(k, p));
        }
    }
    // p = 1 forces every ball into bin 1: M is the complete-graph complexity.
    CHECK(census::mean_m(5, ExactRational(1)) == census::CountTable::max_complexity(5));
    CHECK(census::var_m(5, ExactRational(1)) == 0);
}

TEST_CASE("float-mode moments track the exact ones") {
    for (int k = 2; k <= 30; k += 7) {
        for (const auto& p : p_grid) {
            if (p == 1) continue;
            const long double pd = p.convert_to<long double>();
            const double mean_exact = census::mean_m(k, p).convert_to<double>();
            const double var_exact = census::var_m(k, p).convert_to<double>();
            CHECK(static_cast<double>(census::mean_m_real(k, pd)) ==
                  Catch::Approx(mean_exact).margin(1e-9).epsilon(1e-12));
            CHECK(static_cast<double>(census::var_m_real(k, pd)) ==
                  Catch::Approx(var_exact).margin(1e-9).epsilon(1e-12));
        }
    }
}

TEST_CASE("solve_tilt hits the target surplus") {
    CHECK(census::solve_tilt(3, 1) == 1.0);   // complete-graph complexity, exact by contract
    CHECK(census::solve_tilt(4, 3) == 1.0);
    for (long long k : {10LL, 50LL, 200LL, 2000LL}) {
        const long long l_max = census::CountTable::max_complexity(k);
        for (long long l : {1LL, k / 2, k, 3 * k}) {
            if (l > l_max) continue;
            const double p = census::solve_tilt(k, l);
            REQUIRE(p > 0.0);
            REQUIRE(p <= 1.0);
            const long double residual =
                p * census::mean_m_real(k, p) - static_cast<long double>(l);
            CHECK(std::abs(static_cast<double>(residual)) <=
                  1e-11 * static_cast<double>(std::max(1LL, l)));
        }
    }
    CHECK_THROWS_AS(census::solve_tilt(3, 2), std::domain_error);
    CHECK_THROWS_AS(census::solve_tilt(3, -1), std::domain_error);
    CHECK_THROWS_AS(census::solve_tilt(1, 1), std::domain_error);
}

TEST_CASE("limit scalars") {
    // f1(c) -> c^2/12 as c -> 0.
    CHECK(static_cast<double>(census::f1(0.01L)) ==
          Catch::Approx(0.01 * 0.01 / 12.0).epsilon(1e-2));
    CHECK(static_cast<double>(census::f2(1.0L)) ==
          Catch::Approx(0.07932640579220762).epsilon(1e-13));
    CHECK(static_cast<double>(census::f2(2.0L)) ==
          Catch::Approx(0.06898458475842234).epsilon(1e-13));
    // f2(c) -> 1/12 as c -> 0.
    CHECK(static_cast<double>(census::f2(0.001L)) == Catch::Approx(1.0 / 12.0).epsilon(1e-3));
    CHECK(static_cast<double>(census::tree_probability_limit(2.0L)) ==
          Catch::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("solve_c inverts f1") {
    CHECK(static_cast<double>(census::solve_c(1.0L)) ==
          Catch::Approx(3.830016096309075).epsilon(1e-12));
    for (double beta : {0.3, 0.5, 1.0, 2.0, 5.0}) {
        const long double c = census::solve_c(beta);
        CHECK(static_cast<double>(census::f1(c)) == Catch::Approx(beta).margin(1e-9));
        // Original fixed-point form of the defining equation.
        const long double lhs = std::exp(-c);
        const long double rhs = (2.0L * (beta + 1.0L) - c) / (2.0L * (beta + 1.0L) + c);
        CHECK(static_cast<double>(lhs - rhs) == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(census::solve_c(0.0L), std::domain_error);
    CHECK_THROWS_AS(census::solve_c(-1.0L), std::domain_error);
}

TEST_CASE("walk rates") {
    const long long k = 100;
    const long double p = 0.02L;
    const long double q_k = census::q_power_real(k, p);
    const long double lambda = census::lambda_value(k, p);
    const long double lambda_r = census::lambda_r_value(k, p);
    CHECK(static_cast<double>(lambda) ==
          Catch::Approx(static_cast<double>((k - 1) * p / (1.0L - q_k))).epsilon(1e-15));
    // The right rate is the left rate damped by q^{k-1}.
    CHECK(static_cast<double>(lambda_r) ==
          Catch::Approx(static_cast<double>(lambda * census::q_power_real(k - 1, p)))
              .epsilon(1e-14));
    CHECK(census::epsilon_value(100, 0.02) == Catch::Approx(1.0));
}

TEST_CASE("regime classification") {
    using census::Regime;
    CHECK(census::classify_regime(100, 0).kind == Regime::small);
    CHECK(census::classify_regime(100, 63).kind == Regime::small);     // k^0.9 ~ 63.1
    CHECK(census::classify_regime(100, 64).kind == Regime::large);
    CHECK(census::classify_regime(100, 158).kind == Regime::large);    // k^1.1 ~ 158.5
    CHECK(census::classify_regime(100, 159).kind == Regime::very_large);
    CHECK(census::classify_regime(100, 460).kind == Regime::very_large);   // k ln k ~ 460.5
    CHECK(census::classify_regime(100, 461).kind == Regime::out_of_range);
    const census::RegimeTag tag = census::classify_regime(100, 100);
    CHECK(tag.kind == Regime::large);
    CHECK(static_cast<double>(tag.c_or_beta) == Catch::Approx(3.830016096309075).epsilon(1e-12));
    CHECK(std::string(census::regime_name(Regime::very_large)) == "very_large");
}

TEST_CASE("model bundle") {
    const census::TiltedModel model = census::TiltedModel::make(100, ExactRational(1, 50));
    CHECK(model.k == 100);
    CHECK(model.epsilon == Catch::Approx(1.0));
    CHECK(model.mu == census::mean_m(100, ExactRational(1, 50)));
    CHECK(model.sigma2 == census::var_m(100, ExactRational(1, 50)));
    CHECK(model.sigma2 > 0);
    CHECK(model.lambda > 1.0);
    CHECK(model.lambda_r < 1.0);
}
