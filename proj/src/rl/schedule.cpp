#include "pih/rl/schedule.hpp"

#include <algorithm>

namespace pih::rl {

double LinearSchedule::operator()(long step) const {
  if (horizon <= 0 || step >= horizon) return end;
  if (step <= 0) return start;
  const double f = static_cast<double>(step) / static_cast<double>(horizon);
  return start + (end - start) * f;
}

}  // namespace pih::rl
