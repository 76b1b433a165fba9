#pragma once

#include "gpa/types.hpp"

namespace gpa {

// Global L2 gradient clipping. Disabled specs pass gradients through.
struct ClipSpec {
  bool enabled = false;
  double max_norm = 0.0;

  static ClipSpec disabled() { return {}; }
  static ClipSpec at(double max_norm);

  void validate() const;
};

// Returns g unchanged when ||g|| <= max_norm (or when clipping is disabled),
// otherwise g rescaled onto the max_norm ball. Idempotent: clipping an
// already-clipped vector returns it bit-for-bit.
ParamVector clip_gradient(const ParamVector& g, const ClipSpec& spec);

}  // namespace gpa
