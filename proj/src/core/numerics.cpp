#include "core/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "core/errors.hpp"

namespace evk {

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::InvalidArgument,
         "norm_quantile: p must lie in (0,1), got " + std::to_string(p));

  // AS 241 (Wichura 1988), algorithm PPND16.
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {
boost::math::students_t_distribution<double> t_dist(double df) {
  if (!(df > 0.0))
    fail(ErrorCode::InvalidArgument,
         "student t: df must be positive, got " + std::to_string(df));
  return boost::math::students_t_distribution<double>(df);
}
}  // namespace

double student_t_cdf(double t, double df) {
  return boost::math::cdf(t_dist(df), t);
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::InvalidArgument,
         "student_t_quantile: p must lie in (0,1), got " + std::to_string(p));
  return boost::math::quantile(t_dist(df), p);
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) fail(ErrorCode::InvalidArgument, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  double tail = boost::math::cdf(t_dist(df), -std::fabs(t));
  return std::min(1.0, 2.0 * tail);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) fail(ErrorCode::InvalidArgument, "mean of empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2)
    fail(ErrorCode::InvalidArgument, "sample_variance needs n >= 2");
  double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_sd(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::InvalidArgument, "quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    fail(ErrorCode::InvalidArgument, "quantile level must lie in [0,1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  if (lo == hi) return sorted[lo];
  const double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

unsigned long long binomial_capped(int n, int k, unsigned long long cap) {
  if (n < 0 || k < 0 || k > n)
    fail(ErrorCode::InvalidArgument, "binomial_capped: need 0 <= k <= n");
  k = std::min(k, n - k);
  unsigned long long c = 1;
  constexpr auto kMax = std::numeric_limits<unsigned long long>::max();
  for (int i = 1; i <= k; ++i) {
    // c * (n-k+i) / i equals C(n-k+i, i) exactly at every step.
    const auto f = static_cast<unsigned long long>(n - k + i);
    if (c > kMax / f) return cap + 1;
    c = c * f / static_cast<unsigned long long>(i);
    if (c > cap) return cap + 1;
  }
  return c;
}

}  // namespace evk
