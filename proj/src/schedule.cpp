#include "gpa/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace gpa {

ScheduleShape schedule_shape_from_string(const std::string& s) {
  if (s == "cosine") return ScheduleShape::kCosine;
  if (s == "constant") return ScheduleShape::kConstant;
  if (s == "linear") return ScheduleShape::kLinear;
  throw std::invalid_argument("unknown schedule shape: " + s);
}

std::string to_string(ScheduleShape shape) {
  switch (shape) {
    case ScheduleShape::kCosine: return "cosine";
    case ScheduleShape::kConstant: return "constant";
    case ScheduleShape::kLinear: return "linear";
  }
  throw std::logic_error("unreachable");
}

std::int64_t ScheduleSpec::warmup_steps() const {
  return static_cast<std::int64_t>(std::ceil(warmup_fraction * static_cast<double>(total_steps)));
}

void ScheduleSpec::validate() const {
  if (total_steps < 1) throw std::invalid_argument("schedule: total_steps must be >= 1");
  if (!(peak_lr > 0.0)) throw std::invalid_argument("schedule: peak_lr must be > 0");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw std::invalid_argument("schedule: warmup_fraction must be in [0, 1)");
  }
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
    throw std::invalid_argument("schedule: min_fraction must be in [0, 1]");
  }
  if (warmup_steps() >= total_steps) {
    throw std::invalid_argument("schedule: warmup must end before total_steps");
  }
}

double schedule_value(const ScheduleSpec& spec, std::int64_t t) {
  spec.validate();
  if (t < 1 || t > spec.total_steps) {
    throw std::out_of_range("schedule_value: step " + std::to_string(t) + " outside [1, " +
                            std::to_string(spec.total_steps) + "]");
  }
  const std::int64_t warmup = spec.warmup_steps();
  if (t <= warmup) {
    return spec.peak_lr * static_cast<double>(t) / static_cast<double>(warmup);
  }
  if (spec.shape == ScheduleShape::kConstant) return spec.peak_lr;

  const double lo = spec.min_fraction * spec.peak_lr;
  const double progress =
      static_cast<double>(t - warmup) / static_cast<double>(spec.total_steps - warmup);
  if (spec.shape == ScheduleShape::kLinear) {
    return lo + (spec.peak_lr - lo) * (1.0 - progress);
  }
  return lo + (spec.peak_lr - lo) * 0.5 * (1.0 + std::cos(M_PI * progress));
}

}  // namespace gpa
