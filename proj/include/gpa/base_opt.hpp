#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "gpa/types.hpp"

namespace gpa {

// Per-parameter-set state for decoupled AdamW. Weight decay is NOT applied
// here; wrappers apply it multiplicatively to their base sequence.
struct AdamWState {
  ParamVector exp_avg;     // first moment
  ParamVector exp_avg_sq;  // second moment, entrywise >= 0
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;

  AdamWState(Eigen::Index dim, double beta1, double beta2, double eps);
  void validate() const;
};

struct SgdState {};  // stateless

// Both directions carry the sign of the gradient; every wrapper applies them
// as base_point <- (1 - lr*decay) * base_point - lr * direction.
ParamVector sgd_direction(const ParamVector& grad, SgdState& state);
ParamVector adamw_direction(const ParamVector& grad, AdamWState& state);

// Runtime-polymorphic wrapper so optimizer wrappers and the harness can hold
// either base without templating everything.
class BaseOptimizer {
 public:
  virtual ~BaseOptimizer() = default;
  virtual ParamVector direction(const ParamVector& grad) = 0;
  virtual std::unique_ptr<BaseOptimizer> clone() const = 0;
  virtual std::string name() const = 0;
  // Optimizer-state vectors held alongside the parameters (Adam moments etc.).
  virtual int aux_buffer_count() const = 0;
};

class SgdOptimizer final : public BaseOptimizer {
 public:
  ParamVector direction(const ParamVector& grad) override;
  std::unique_ptr<BaseOptimizer> clone() const override;
  std::string name() const override { return "sgd"; }
  int aux_buffer_count() const override { return 0; }

 private:
  SgdState state_;
};

class AdamWOptimizer final : public BaseOptimizer {
 public:
  AdamWOptimizer(Eigen::Index dim, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  explicit AdamWOptimizer(AdamWState state);

  ParamVector direction(const ParamVector& grad) override;
  std::unique_ptr<BaseOptimizer> clone() const override;
  std::string name() const override { return "adamw"; }
  int aux_buffer_count() const override { return 2; }

  const AdamWState& state() const { return state_; }
  AdamWState& state() { return state_; }

 private:
  AdamWState state_;
};

}  // namespace gpa
