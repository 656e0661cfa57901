#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "core/numerics.hpp"
#include "test_util.hpp"

using namespace evk;

TEST_CASE("normal quantile hits the frozen reference values") {
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(norm_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(norm_quantile(0.8) ==
        doctest::Approx(0.8416212335729143).epsilon(1e-9));
  CHECK(norm_quantile(0.95) ==
        doctest::Approx(1.6448536269514722).epsilon(1e-9));
}

TEST_CASE("normal quantile matches an independent implementation on a grid") {
  boost::math::normal_distribution<double> normal;
  for (double p = 1e-6; p < 1.0; p += 0.000997) {
    CAPTURE(p);
    CHECK(std::fabs(norm_quantile(p) - boost::math::quantile(normal, p)) <
          1e-8);
  }
  // Deep tails.
  for (double p : {1e-10, 1e-12, 1.0 - 1e-10}) {
    CHECK(std::fabs(norm_quantile(p) - boost::math::quantile(normal, p)) <
          1e-7);
  }
}

TEST_CASE("normal quantile symmetry and cdf round trip") {
  for (double p : {0.001, 0.01, 0.1, 0.25, 0.4, 0.49}) {
    CHECK(norm_quantile(p) == doctest::Approx(-norm_quantile(1.0 - p)).epsilon(1e-10));
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK_FAILS_WITH(norm_quantile(0.0), ErrorCode::InvalidArgument);
  CHECK_FAILS_WITH(norm_quantile(1.0), ErrorCode::InvalidArgument);
  CHECK_FAILS_WITH(norm_quantile(-0.3), ErrorCode::InvalidArgument);
}

TEST_CASE("student t basics") {
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-12));
  // Large df approaches the normal.
  CHECK(student_t_two_sided_p(1.959963984540054, 1e7) ==
        doctest::Approx(0.05).epsilon(1e-4));
  // Known value: t with 1 df is Cauchy; P(T <= 1) = 0.75.
  CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(student_t_quantile(0.75, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FAILS_WITH(student_t_cdf(0.0, -1.0), ErrorCode::InvalidArgument);
}

TEST_CASE("mean and sample sd") {
  std::vector<double> two = {0.01, 0.03};
  CHECK(mean(two) == doctest::Approx(0.02).epsilon(1e-15));
  // Frozen: sd of a two-point sample is |diff|/sqrt(2).
  CHECK(sample_sd(two) == doctest::Approx(0.01414213562373095).epsilon(1e-12));
  CHECK_FAILS_WITH(mean(std::vector<double>{}), ErrorCode::InvalidArgument);
  CHECK_FAILS_WITH(sample_variance(std::vector<double>{1.0}),
                   ErrorCode::InvalidArgument);
}

TEST_CASE("linear-interpolation quantile") {
  std::vector<double> s = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(s, 0.0) == 1.0);
  CHECK(quantile_sorted(s, 1.0) == 4.0);
  CHECK(quantile_sorted(s, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted(s, 0.25) == doctest::Approx(1.75));
  std::vector<double> one = {7.0};
  CHECK(quantile_sorted(one, 0.3) == 7.0);
  CHECK_FAILS_WITH(quantile_sorted(s, 1.5), ErrorCode::InvalidArgument);
}

TEST_CASE("capped binomial coefficients") {
  CHECK(binomial_capped(15, 8, 1000000) == 6435);
  CHECK(binomial_capped(4, 2, 100) == 6);
  CHECK(binomial_capped(10, 0, 5) == 1);
  CHECK(binomial_capped(10, 10, 5) == 1);
  CHECK(binomial_capped(20, 10, 100000) == 100001);  // 184756 > cap
  CHECK(binomial_capped(300, 150, 1000000) == 1000001);  // would overflow
  CHECK_FAILS_WITH(binomial_capped(3, 5, 10), ErrorCode::InvalidArgument);
}
