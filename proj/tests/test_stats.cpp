#include "census/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

TEST_CASE("normal cdf") {
    CHECK(census::normal_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(census::normal_cdf(1.0) == Catch::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(census::normal_cdf(-1.0) == Catch::Approx(1.0 - 0.8413447460685429).epsilon(1e-14));
    CHECK(census::normal_cdf(-8.0) + census::normal_cdf(8.0) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(census::normal_cdf(39.0) == 1.0);
}

TEST_CASE("regularized upper incomplete gamma against closed forms") {
    // Q(1, x) = e^{-x}.
    for (double x : {0.1, 1.0, 3.0, 10.0, 40.0})
        CHECK(census::gamma_q(1.0, x) == Catch::Approx(std::exp(-x)).epsilon(1e-13));
    // Q(1/2, x) = erfc(sqrt(x)).
    for (double x : {0.01, 0.5, 2.0, 9.0})
        CHECK(census::gamma_q(0.5, x) == Catch::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
    // Q(2, x) = (1+x) e^{-x}.
    for (double x : {0.2, 1.5, 6.0})
        CHECK(census::gamma_q(2.0, x) == Catch::Approx((1.0 + x) * std::exp(-x)).epsilon(1e-13));
    CHECK(census::gamma_q(3.0, 0.0) == 1.0);
    CHECK_THROWS_AS(census::gamma_q(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(census::gamma_q(1.0, -1.0), std::domain_error);
}

TEST_CASE("chi-square tail probabilities") {
    CHECK(census::chi_square_pvalue(3.841458820694124, 1) == Catch::Approx(0.05).epsilon(1e-12));
    CHECK(census::chi_square_pvalue(5.991464547107979, 2) == Catch::Approx(0.05).epsilon(1e-12));
    CHECK(census::chi_square_pvalue(25.0, 15) ==
          Catch::Approx(0.049943433626428367).epsilon(1e-12));
    CHECK(census::chi_square_pvalue(21.064, 14) ==
          Catch::Approx(0.1000036451112862).epsilon(1e-12));
    CHECK(census::chi_square_pvalue(7.2609, 15) ==
          Catch::Approx(0.95000135718083142).epsilon(1e-12));
    CHECK(census::chi_square_pvalue(0.0, 5) == 1.0);

    // Monotone decreasing in the statistic.
    double prev = 1.0;
    for (double x = 0.5; x < 60.0; x += 0.5) {
        const double p = census::chi_square_pvalue(x, 10);
        CHECK(p < prev);
        prev = p;
    }
    CHECK_THROWS_AS(census::chi_square_pvalue(1.0, 0), std::domain_error);
    CHECK_THROWS_AS(census::chi_square_pvalue(-1.0, 3), std::domain_error);
}
