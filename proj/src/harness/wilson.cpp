#include "pih/harness/wilson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pih {

Interval wilson_ci(long successes, long trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson_ci needs at least one trial");
  if (successes < 0 || successes > trials) throw std::invalid_argument("successes must be in [0, trials]");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // The closed form hits the boundaries exactly in real arithmetic.
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  return ci;
}

}  // namespace pih
