#pragma once

#include <cstdint>
#include <string>

namespace gpa {

enum class ScheduleShape { kCosine, kConstant, kLinear };

ScheduleShape schedule_shape_from_string(const std::string& s);
std::string to_string(ScheduleShape shape);

// Learning-rate schedule over 1-based global steps t in [1, total_steps]:
// a linear ramp from peak_lr/W up to peak_lr over the W warmup steps,
// W = ceil(warmup_fraction * total_steps), followed by the decay shape down
// to min_fraction * peak_lr at t = total_steps.
struct ScheduleSpec {
  std::int64_t total_steps = 0;
  double peak_lr = 0.0;
  double warmup_fraction = 0.0;
  double min_fraction = 0.0;
  ScheduleShape shape = ScheduleShape::kCosine;

  std::int64_t warmup_steps() const;
  void validate() const;  // throws std::invalid_argument
};

double schedule_value(const ScheduleSpec& spec, std::int64_t t);

}  // namespace gpa
