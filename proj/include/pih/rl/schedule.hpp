#pragma once

namespace pih::rl {

/// Linear interpolation from `start` at step 0 to `end` at `horizon`,
/// constant afterwards.
struct LinearSchedule {
  double start = 0.0;
  double end = 0.0;
  long horizon = 1;

  double operator()(long step) const;
};

}  // namespace pih::rl
