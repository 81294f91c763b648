// test_distributions.cpp
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spikedim/distributions.hpp"
#include "test_support.hpp"

using namespace spikedim;
using spikedim::testing::chi_square_sf_even;
using spikedim::testing::normal_cdf_quadrature;

// Reference values computed with scipy.stats (chi2/norm) and frozen here.
TEST_CASE("normal cdf at reference points") {
  REQUIRE(normal_cdf(0.0) == 0.5);
  REQUIRE(std::abs(normal_cdf(1.959963984540054) - 0.975) < 1e-12);
  REQUIRE(std::abs(normal_cdf(1.959964) - 0.975) < 1e-6);
  REQUIRE(std::abs(2.0 * normal_sf(2.0) - 0.04550026389635839) < 1e-12);
  for (double x : {-5.0, -2.5, -1.0, -0.3, 0.7, 1.5, 3.0, 6.0}) {
    INFO("x = " << x);
    const double oracle = x >= 0 ? normal_cdf_quadrature(x)
                                 : 1.0 - normal_cdf_quadrature(-x);
    REQUIRE(std::abs(normal_cdf(x) - oracle) < 1e-10);
    REQUIRE(std::abs(normal_cdf(x) + normal_sf(x) - 1.0) < 1e-15);
  }
}

TEST_CASE("normal quantile inverts the cdf") {
  REQUIRE(std::abs(normal_quantile(0.975) - 1.959963984540054) < 1e-12);
  for (double p : {1e-12, 1e-6, 0.01, 0.02425, 0.2, 0.5, 0.8, 0.975, 0.999999}) {
    INFO("p = " << p);
    REQUIRE(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-12 * std::max(1.0, p / 1e-3) + 1e-14);
  }
  REQUIRE(std::isinf(normal_quantile(0.0)));
  REQUIRE(std::isinf(normal_quantile(1.0)));
}

TEST_CASE("chi-square cdf at the support boundary") {
  for (double df : {1.0, 2.0, 14.0, 1430.0}) {
    REQUIRE(chi_square_cdf(0.0, df) == 0.0);
    REQUIRE(chi_square_sf(0.0, df) == 1.0);
    REQUIRE(chi_square_cdf(-3.0, df) == 0.0);
  }
}

TEST_CASE("chi-square against the closed form for even df") {
  for (int df : {2, 4, 14, 30, 100}) {
    for (double x : {0.1, 1.0, 5.0, 13.0, 23.7, 40.0, 120.0}) {
      INFO("df = " << df << ", x = " << x);
      const double oracle = chi_square_sf_even(x, df);
      REQUIRE(std::abs(chi_square_sf(x, df) - oracle) < 1e-10);
      REQUIRE(std::abs(chi_square_cdf(x, df) - (1.0 - oracle)) < 1e-10);
    }
  }
}

TEST_CASE("chi-square at frozen reference values") {
  REQUIRE(std::abs(chi_square_sf(23.684791304840576, 14) - 0.05) < 1e-10);
  REQUIRE(std::abs(chi_square_cdf(3.5, 7) - 0.16477451738965782) < 1e-10);
  REQUIRE(std::abs(chi_square_cdf(100.0, 80) - 0.935429631078867) < 1e-10);
  REQUIRE(std::abs(chi_square_cdf(0.01, 1) - 0.07965567455405799) < 1e-10);
  REQUIRE(std::abs(chi_square_sf(1458.0, 1430) - 0.2971421844138101) < 1e-8);
}

TEST_CASE("incomplete gamma pieces are complementary") {
  for (double a : {0.5, 1.0, 7.5, 300.0}) {
    for (double x : {0.2, a, a + 2.0, 3.0 * a}) {
      REQUIRE(std::abs(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) - 1.0) < 1e-13);
    }
  }
}
