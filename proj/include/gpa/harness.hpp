#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpa/gpa.hpp"
#include "gpa/schedule.hpp"
#include "gpa/types.hpp"

namespace gpa {

// Configuration problems map to CLI exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method {
  kBase,
  kGpa,
  kGpaMem,
  kDiloco,
  kScheduleFree,
  kNesterovModern,
  kNesterovSutskever,
  kNesterovPrimal,
  kPolyakModern,
  kPolyakPrimal,
};

Method method_from_string(const std::string& name);
std::string to_string(Method method);

struct OptimizerSpec {
  std::string base = "sgd";  // "sgd" or "adamw"
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  bool clip = true;
  double clip_norm = 1.0;
  // Wrapper hyperparameters; which ones must be present depends on the method.
  std::optional<double> mu_x;           // gpa, gpa_mem
  std::optional<double> mu_y;           // gpa, gpa_mem
  std::optional<double> mu;             // momentum reference forms
  std::optional<std::int64_t> H;        // diloco inner steps
  std::optional<double> outer_lr;       // diloco
  std::optional<double> outer_momentum; // diloco
  std::optional<double> sf_beta;        // schedule_free
};

struct ProblemSpec {
  std::string kind;  // "quadratic", "logistic", "robust_median"
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  std::vector<double> init;  // explicit start point; overrides init_scale
  // quadratic
  Eigen::Index dim = 0;
  double eig_min = 1.0;
  double eig_max = 1.0;
  double noise_std = 0.0;
  // logistic
  Eigen::Index n_samples = 0;
  double l2_reg = 0.0;
  Eigen::Index batch_size = 1;
  std::string csv_path;  // nonempty: load features/labels instead of sampling
  // robust_median
  std::vector<double> targets;
};

struct RunConfig {
  std::string name = "run";
  Method method = Method::kBase;
  OptimizerSpec optimizer;
  ProblemSpec problem;
  ScheduleSpec schedule;  // total_steps lives here
  std::uint64_t seed = 0;
  std::int64_t eval_every = 1;
  std::string output_path;
  bool record_wall_time = true;

  void validate() const;  // throws ConfigError
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

struct EvalRow {
  std::int64_t step = 0;
  double lr = 0.0;
  double loss_x = 0.0;
  double loss_y = 0.0;
  double loss_z = 0.0;
  std::optional<double> dist_opt;
  double wall_ms = 0.0;
};

struct RunRecord {
  std::vector<EvalRow> rows;
  bool diverged = false;

  double final_loss() const;
  double best_loss() const;
  std::int64_t last_step() const;
};

// CSV schema: header `step,lr,loss_x,loss_y,loss_z,dist_opt,wall_ms`, one row
// per evaluation, empty dist_opt field when no optimum is known, and a
// trailing `# diverged` marker line for truncated runs. Doubles print in
// shortest round-trip form, so parse(emit(record)) == record exactly.
std::string to_csv(const RunRecord& record);
RunRecord parse_csv(const std::string& text);
void write_csv(const RunRecord& record, const std::string& path);
RunRecord read_csv(const std::string& path);

// Executes the configured run; deterministic given (config, seed) apart from
// the wall_ms column (zeroed when record_wall_time is off). A non-finite
// iterate or loss truncates the record and sets the divergence flag.
RunRecord run(const RunConfig& config);

// First evaluated step whose eval-point loss reaches the target.
std::optional<std::int64_t> steps_to_target(const RunRecord& record, double target_loss);

struct SweepEntry {
  std::string name;
  double final_loss = 0.0;
  double best_loss = 0.0;
  std::int64_t steps = 0;
  bool diverged = false;
  bool best = false;  // argmin over completed runs
};

struct SweepSummary {
  std::vector<SweepEntry> entries;  // sorted ascending, divergent runs last

  std::string to_json() const;
  std::string to_table() const;
};

// Runs every config (in `threads` parallel workers); results are independent
// of execution order and parallelism degree. Divergent runs are flagged, not
// dropped.
SweepSummary sweep(const std::vector<RunConfig>& grid, int threads = 1);

struct CompareEntry {
  std::string name;
  std::optional<double> speedup_percent;  // nullopt: target never reached
};

struct CompareReport {
  std::string baseline;
  double baseline_final_loss = 0.0;
  std::int64_t baseline_steps = 0;
  std::vector<CompareEntry> entries;

  std::string to_table() const;
};

// Speedup of each record against the named baseline, measured as the
// percentage reduction in steps needed to reach the baseline's final loss.
CompareReport compare(const std::map<std::string, RunRecord>& records,
                      const std::string& baseline);

// Versioned little-endian checkpoint for the three-sequence optimizer state:
// magic, dim, the three sequences, scalars, then the base-optimizer state.
void save_gpa_checkpoint(const GpaState& state, const std::string& path);
GpaState load_gpa_checkpoint(const std::string& path);

}  // namespace gpa
