#pragma once

namespace pih {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for `successes` out of `trials`:
///   centre = (p + z^2 / 2N) / (1 + z^2 / N)
///   half   = z * sqrt(p (1 - p) / N + z^2 / 4N^2) / (1 + z^2 / N)
/// Throws std::invalid_argument unless 0 <= successes <= trials and trials > 0.
Interval wilson_ci(long successes, long trials, double z = 1.96);

}  // namespace pih
