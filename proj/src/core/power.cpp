#include "core/power.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace evk {

double z_quantile(double p) { return norm_quantile(p); }

namespace {
double z_sum(double alpha, double power) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  if (!(power > 0.0 && power < 1.0))
    fail(ErrorCode::InvalidArgument, "power must lie in (0,1)");
  return norm_quantile(1.0 - alpha / 2.0) + norm_quantile(power);
}
}  // namespace

long long required_events_per_group(double alpha, double power, double d) {
  const double z = z_sum(alpha, power);
  if (d == 0.0)
    fail(ErrorCode::InvalidArgument,
         "required_events_per_group: effect size d must be nonzero");
  const double n = 2.0 * (z / d) * (z / d);
  return static_cast<long long>(std::ceil(n));
}

double minimum_detectable_effect(double alpha, double power, double sigma,
                                 long long n1, long long n2) {
  const double z = z_sum(alpha, power);
  if (sigma < 0.0)
    fail(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (n1 < 1 || n2 < 1)
    fail(ErrorCode::InvalidArgument,
         "group sizes must be >= 1, got " + std::to_string(n1) + " and " +
             std::to_string(n2));
  return z * sigma *
         std::sqrt(1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
}

}  // namespace evk
