#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

namespace gpa {

// Flat double-precision parameter vector, the state currency of the library.
using ParamVector = Eigen::VectorXd;

// Stochastic gradient (or subgradient) oracle: evaluates g(point; noise) at
// the supplied point. Each optimizer step queries it exactly once, so callers
// that share an oracle across side-by-side runs see aligned noise sequences.
using GradOracle = std::function<ParamVector(const ParamVector&)>;

inline bool all_finite(const ParamVector& v) { return v.allFinite(); }

// mu * a + (1 - mu) * b, with exact passthrough at mu = 0 and mu = 1 so the
// degenerate optimizer configurations collapse bit-for-bit.
inline ParamVector blend(double mu, const ParamVector& a, const ParamVector& b) {
  if (mu == 0.0) return b;
  if (mu == 1.0) return a;
  return mu * a + (1.0 - mu) * b;
}

void require_finite(const ParamVector& v, const std::string& what);
void require_same_dim(const ParamVector& a, const ParamVector& b, const std::string& what);

}  // namespace gpa
