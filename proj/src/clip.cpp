#include "gpa/clip.hpp"

#include <stdexcept>

namespace gpa {

ClipSpec ClipSpec::at(double max_norm) {
  ClipSpec spec;
  spec.enabled = true;
  spec.max_norm = max_norm;
  spec.validate();
  return spec;
}

void ClipSpec::validate() const {
  if (enabled && !(max_norm > 0.0)) {
    throw std::invalid_argument("clip: max_norm must be > 0 when enabled");
  }
}

ParamVector clip_gradient(const ParamVector& g, const ClipSpec& spec) {
  spec.validate();
  require_finite(g, "clip_gradient");
  if (!spec.enabled) return g;
  const double norm = g.norm();
  if (norm <= spec.max_norm) return g;
  // Shrink a hair below max_norm so the rescaled vector's recomputed norm
  // still passes the threshold test; keeps repeated clipping a no-op.
  const double scale = spec.max_norm / norm * (1.0 - 1e-13);
  return g * scale;
}

}  // namespace gpa
