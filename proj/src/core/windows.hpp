#pragma once

#include <string>

#include "core/errors.hpp"

namespace evk {

// Event-time layout.  The estimation sample is the most recent
// `estimation_length` realized returns dated on or before
// event - gap_length - 1; an asset is skipped when fewer than
// `estimation_min` such returns exist.  The event window covers relative
// days tau1..tau2 inclusive.
struct WindowConfig {
  int estimation_length = 250;
  int estimation_min = 120;
  int gap_length = 30;
  int tau1 = -5;
  int tau2 = 30;

  int window_span() const { return tau2 - tau1 + 1; }

  void validate() const {
    if (estimation_min < 2)
      fail(ErrorCode::InvalidArgument, "estimation_min must be at least 2");
    if (estimation_length < estimation_min)
      fail(ErrorCode::InvalidArgument,
           "estimation_length (" + std::to_string(estimation_length) +
               ") must be >= estimation_min (" + std::to_string(estimation_min) + ")");
    if (gap_length < 0)
      fail(ErrorCode::InvalidArgument, "gap_length must be >= 0");
    if (tau1 > tau2)
      fail(ErrorCode::InvalidArgument,
           "event window start " + std::to_string(tau1) +
               " exceeds end " + std::to_string(tau2));
    if (tau1 < -gap_length)
      fail(ErrorCode::InvalidArgument,
           "event window start " + std::to_string(tau1) +
               " reaches into the estimation side of the gap (gap_length " +
               std::to_string(gap_length) + ")");
  }
};

}  // namespace evk
