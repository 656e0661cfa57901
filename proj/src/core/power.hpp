#pragma once

namespace evk {

// Normal-approximation power algebra for two-sample mean comparisons.

// Standard-normal quantile; p outside (0,1) -> InvalidArgument.
double z_quantile(double p);

// Events per group for a two-sided level-alpha test to reach `power` against
// a standardized difference d (Cohen's d != 0):
//   ceil( 2 * ((z_{1-alpha/2} + z_{power}) / d)^2 ).
long long required_events_per_group(double alpha, double power, double d);

// Minimum detectable standardized-or-raw difference at the given group sizes:
//   (z_{1-alpha/2} + z_{power}) * sigma * sqrt(1/n1 + 1/n2).
double minimum_detectable_effect(double alpha, double power, double sigma,
                                 long long n1, long long n2);

}  // namespace evk
