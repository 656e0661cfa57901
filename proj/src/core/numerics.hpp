#pragma once

#include <cstdint>
#include <span>

namespace evk {

// Standard-normal quantile (inverse CDF).  Wichura's AS 241 rational
// approximation; absolute error below 1e-9 across (0,1).  Throws
// InvalidArgument outside the open interval.
double norm_quantile(double p);

double norm_cdf(double x);

// Student-t distribution (df > 0).
double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);

// Two-sided p-value for a t statistic.
double student_t_two_sided_p(double t, double df);

double mean(std::span<const double> xs);          // throws on empty
double sample_variance(std::span<const double> xs);  // n-1 denominator; n >= 2
double sample_sd(std::span<const double> xs);

// Quantile of an ascending-sorted sample by linear interpolation at rank
// h = q * (n - 1) (the "type 7" rule).  q in [0,1]; sample must be non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

// C(n, k), capped: returns the exact value if it is <= cap, otherwise
// cap + 1 (computation stops early; no overflow for any inputs).
unsigned long long binomial_capped(int n, int k, unsigned long long cap);

}  // namespace evk
