#include "gpa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gpa/base_opt.hpp"
#include "gpa/momentum.hpp"
#include "gpa/problems.hpp"
#include "gpa/wrappers.hpp"

namespace gpa {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGradStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kProblemStream = 0;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad numeric field: '" + s + "'");
  }
  return v;
}

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "base") return Method::kBase;
  if (name == "gpa") return Method::kGpa;
  if (name == "gpa_mem") return Method::kGpaMem;
  if (name == "diloco") return Method::kDiloco;
  if (name == "schedule_free") return Method::kScheduleFree;
  if (name == "nesterov_modern") return Method::kNesterovModern;
  if (name == "nesterov_sutskever") return Method::kNesterovSutskever;
  if (name == "nesterov_primal") return Method::kNesterovPrimal;
  if (name == "polyak_modern") return Method::kPolyakModern;
  if (name == "polyak_primal") return Method::kPolyakPrimal;
  throw ConfigError("unknown method: " + name);
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kBase: return "base";
    case Method::kGpa: return "gpa";
    case Method::kGpaMem: return "gpa_mem";
    case Method::kDiloco: return "diloco";
    case Method::kScheduleFree: return "schedule_free";
    case Method::kNesterovModern: return "nesterov_modern";
    case Method::kNesterovSutskever: return "nesterov_sutskever";
    case Method::kNesterovPrimal: return "nesterov_primal";
    case Method::kPolyakModern: return "polyak_modern";
    case Method::kPolyakPrimal: return "polyak_primal";
  }
  throw std::logic_error("unreachable");
}

void RunConfig::validate() const {
  try {
    schedule.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (optimizer.base != "sgd" && optimizer.base != "adamw") {
    throw ConfigError("optimizer.base must be sgd or adamw");
  }
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) ||
      !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
    throw ConfigError("adamw betas must be in [0, 1)");
  }
  if (!(optimizer.eps >= 0.0)) throw ConfigError("adamw eps must be >= 0");
  if (!(optimizer.weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (optimizer.clip && !(optimizer.clip_norm > 0.0)) {
    throw ConfigError("clip_norm must be > 0 when clipping is on");
  }
  auto need = [&](const auto& field, const std::string& key) {
    if (!field.has_value()) {
      throw ConfigError(to_string(method) + " requires optimizer." + key);
    }
  };
  auto in_unit = [&](double v, const std::string& key, bool allow_one) {
    const bool ok = v >= 0.0 && (allow_one ? v <= 1.0 : v < 1.0);
    if (!ok) throw ConfigError("optimizer." + key + " out of range");
  };
  switch (method) {
    case Method::kBase:
      break;
    case Method::kGpa:
    case Method::kGpaMem:
      need(optimizer.mu_x, "mu_x");
      need(optimizer.mu_y, "mu_y");
      in_unit(*optimizer.mu_x, "mu_x", false);
      in_unit(*optimizer.mu_y, "mu_y", true);
      if (method == Method::kGpaMem && !(*optimizer.mu_y > 0.0)) {
        throw ConfigError("gpa_mem requires optimizer.mu_y > 0");
      }
      break;
    case Method::kDiloco:
      need(optimizer.H, "H");
      need(optimizer.outer_lr, "outer_lr");
      need(optimizer.outer_momentum, "outer_momentum");
      if (*optimizer.H < 1) throw ConfigError("optimizer.H must be >= 1");
      if (!(*optimizer.outer_lr > 0.0)) throw ConfigError("optimizer.outer_lr must be > 0");
      in_unit(*optimizer.outer_momentum, "outer_momentum", true);
      break;
    case Method::kScheduleFree:
      need(optimizer.sf_beta, "sf_beta");
      in_unit(*optimizer.sf_beta, "sf_beta", true);
      if (schedule.shape != ScheduleShape::kConstant) {
        throw ConfigError("schedule_free runs use shape=constant (warmup then flat)");
      }
      break;
    case Method::kNesterovModern:
    case Method::kNesterovSutskever:
    case Method::kNesterovPrimal:
    case Method::kPolyakModern:
    case Method::kPolyakPrimal:
      need(optimizer.mu, "mu");
      in_unit(*optimizer.mu, "mu", false);
      break;
  }
  if (problem.kind != "quadratic" && problem.kind != "logistic" &&
      problem.kind != "robust_median") {
    throw ConfigError("unknown problem kind: " + problem.kind);
  }
}

namespace {

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.name = j.value("name", std::string("run"));
    cfg.method = method_from_string(j.at("method").get<std::string>());
    cfg.seed = j.value("seed", 0ULL);
    cfg.eval_every = j.value("eval_every", std::int64_t{1});
    cfg.output_path = j.value("output", std::string());
    cfg.record_wall_time = j.value("record_wall_time", true);

    const json& sched = j.at("schedule");
    cfg.schedule.total_steps = j.at("total_steps").get<std::int64_t>();
    cfg.schedule.peak_lr = sched.at("peak_lr").get<double>();
    cfg.schedule.warmup_fraction = sched.value("warmup_fraction", 0.0);
    cfg.schedule.min_fraction = sched.value("min_fraction", 0.0);
    cfg.schedule.shape = schedule_shape_from_string(sched.value("shape", std::string("cosine")));

    const json& opt = j.at("optimizer");
    cfg.optimizer.base = opt.value("base", std::string("sgd"));
    cfg.optimizer.beta1 = opt.value("beta1", 0.9);
    cfg.optimizer.beta2 = opt.value("beta2", 0.999);
    cfg.optimizer.eps = opt.value("eps", 1e-8);
    cfg.optimizer.weight_decay = opt.value("weight_decay", 0.0);
    cfg.optimizer.clip = opt.value("clip", true);
    cfg.optimizer.clip_norm = opt.value("clip_norm", 1.0);
    if (opt.contains("mu_x")) cfg.optimizer.mu_x = opt.at("mu_x").get<double>();
    if (opt.contains("mu_y")) cfg.optimizer.mu_y = opt.at("mu_y").get<double>();
    if (opt.contains("mu")) cfg.optimizer.mu = opt.at("mu").get<double>();
    if (opt.contains("H")) cfg.optimizer.H = opt.at("H").get<std::int64_t>();
    if (opt.contains("outer_lr")) cfg.optimizer.outer_lr = opt.at("outer_lr").get<double>();
    if (opt.contains("outer_momentum")) {
      cfg.optimizer.outer_momentum = opt.at("outer_momentum").get<double>();
    }
    if (opt.contains("sf_beta")) cfg.optimizer.sf_beta = opt.at("sf_beta").get<double>();

    const json& prob = j.at("problem");
    cfg.problem.kind = prob.at("kind").get<std::string>();
    cfg.problem.seed = prob.value("seed", 0ULL);
    cfg.problem.init_scale = prob.value("init_scale", 1.0);
    if (prob.contains("init")) cfg.problem.init = prob.at("init").get<std::vector<double>>();
    cfg.problem.dim = prob.value("dim", Eigen::Index{0});
    cfg.problem.eig_min = prob.value("eig_min", 1.0);
    cfg.problem.eig_max = prob.value("eig_max", 1.0);
    cfg.problem.noise_std = prob.value("noise_std", 0.0);
    cfg.problem.n_samples = prob.value("n_samples", Eigen::Index{0});
    cfg.problem.l2_reg = prob.value("l2_reg", 0.0);
    cfg.problem.batch_size = prob.value("batch_size", Eigen::Index{1});
    cfg.problem.csv_path = prob.value("csv", std::string());
    if (prob.contains("targets")) {
      cfg.problem.targets = prob.at("targets").get<std::vector<double>>();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_run_config(ss.str());
  if (cfg.name == "run") {
    // default the name to the file stem
    std::string stem = path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) {
      stem = stem.substr(slash + 1);
    }
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) {
      stem = stem.substr(0, dot);
    }
    cfg.name = stem;
  }
  return cfg;
}

double RunRecord::final_loss() const {
  if (rows.empty()) throw std::logic_error("run record has no rows");
  return rows.back().loss_x;
}

double RunRecord::best_loss() const {
  if (rows.empty()) throw std::logic_error("run record has no rows");
  double best = rows.front().loss_x;
  for (const EvalRow& r : rows) best = std::min(best, r.loss_x);
  return best;
}

std::int64_t RunRecord::last_step() const {
  if (rows.empty()) throw std::logic_error("run record has no rows");
  return rows.back().step;
}

std::string to_csv(const RunRecord& record) {
  std::string out = "step,lr,loss_x,loss_y,loss_z,dist_opt,wall_ms\n";
  for (const EvalRow& r : record.rows) {
    out += std::to_string(r.step);
    out += ',';
    out += format_double(r.lr);
    out += ',';
    out += format_double(r.loss_x);
    out += ',';
    out += format_double(r.loss_y);
    out += ',';
    out += format_double(r.loss_z);
    out += ',';
    if (r.dist_opt.has_value()) out += format_double(*r.dist_opt);
    out += ',';
    out += format_double(r.wall_ms);
    out += '\n';
  }
  if (record.diverged) out += "# diverged\n";
  return out;
}

RunRecord parse_csv(const std::string& text) {
  RunRecord record;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw std::runtime_error("empty CSV");
  if (line != "step,lr,loss_x,loss_y,loss_z,dist_opt,wall_ms") {
    throw std::runtime_error("unexpected CSV header: " + line);
  }
  std::int64_t prev_step = -1;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line == "# diverged") {
      record.diverged = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    // a trailing empty cell is dropped by getline; dist_opt may be empty
    if (cells.size() == 6) cells.insert(cells.begin() + 5, "");
    if (cells.size() != 7) throw std::runtime_error("bad CSV row: " + line);
    EvalRow r;
    r.step = static_cast<std::int64_t>(std::stoll(cells[0]));
    r.lr = parse_double(cells[1]);
    r.loss_x = parse_double(cells[2]);
    r.loss_y = parse_double(cells[3]);
    r.loss_z = parse_double(cells[4]);
    if (!cells[5].empty()) r.dist_opt = parse_double(cells[5]);
    r.wall_ms = parse_double(cells[6]);
    if (r.step <= prev_step) throw std::runtime_error("CSV steps not increasing");
    prev_step = r.step;
    record.rows.push_back(r);
  }
  return record;
}

void write_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_csv(record);
}

RunRecord read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

namespace {

std::unique_ptr<Problem> build_problem(const ProblemSpec& spec) {
  RngStream rng(spec.seed, kProblemStream);
  if (spec.kind == "quadratic") {
    if (spec.dim < 1) throw ConfigError("quadratic problem needs dim >= 1");
    return std::make_unique<QuadraticProblem>(
        QuadraticProblem::random(spec.dim, rng, spec.eig_min, spec.eig_max, spec.noise_std));
  }
  if (spec.kind == "logistic") {
    if (!spec.csv_path.empty()) {
      return std::make_unique<LogisticProblem>(
          LogisticProblem::from_csv(spec.csv_path, spec.l2_reg, spec.batch_size));
    }
    if (spec.dim < 1 || spec.n_samples < 1) {
      throw ConfigError("logistic problem needs dim and n_samples");
    }
    return std::make_unique<LogisticProblem>(LogisticProblem::synthetic(
        spec.n_samples, spec.dim, rng, spec.l2_reg, spec.batch_size));
  }
  if (spec.kind == "robust_median") {
    if (spec.targets.empty()) throw ConfigError("robust_median problem needs targets");
    return std::make_unique<RobustMedianProblem>(spec.targets);
  }
  throw ConfigError("unknown problem kind: " + spec.kind);
}

ParamVector initial_point(const ProblemSpec& spec, Eigen::Index dim, std::uint64_t run_seed) {
  if (!spec.init.empty()) {
    if (static_cast<Eigen::Index>(spec.init.size()) != dim) {
      throw ConfigError("problem.init length does not match problem dimension");
    }
    return Eigen::Map<const ParamVector>(spec.init.data(), dim);
  }
  RngStream rng(run_seed, kInitStream);
  return rng.normal_vector(dim, spec.init_scale);
}

std::unique_ptr<BaseOptimizer> build_base(const OptimizerSpec& spec, Eigen::Index dim) {
  if (spec.base == "adamw") {
    return std::make_unique<AdamWOptimizer>(dim, spec.beta1, spec.beta2, spec.eps);
  }
  return std::make_unique<SgdOptimizer>();
}

ClipSpec build_clip(const OptimizerSpec& spec) {
  return spec.clip ? ClipSpec::at(spec.clip_norm) : ClipSpec::disabled();
}

// Uniform stepping interface over every method the harness can run.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual void step(const GradOracle& oracle, double lr) = 0;
  virtual ParamVector eval_point() const = 0;
  virtual ParamVector train_point() const { return eval_point(); }
  virtual ParamVector base_point() const { return eval_point(); }
};

class BaseStepper final : public Stepper {
 public:
  BaseStepper(ParamVector x0, std::unique_ptr<BaseOptimizer> base, double weight_decay,
              ClipSpec clip)
      : x_(std::move(x0)), base_(std::move(base)), weight_decay_(weight_decay), clip_(clip) {}

  void step(const GradOracle& oracle, double lr) override {
    const ParamVector g = oracle(x_);
    if (!g.allFinite()) throw std::runtime_error("base: non-finite gradient");
    const ParamVector d = base_->direction(clip_gradient(g, clip_));
    x_ = (1.0 - lr * weight_decay_) * x_ - lr * d;
  }
  ParamVector eval_point() const override { return x_; }

 private:
  ParamVector x_;
  std::unique_ptr<BaseOptimizer> base_;
  double weight_decay_;
  ClipSpec clip_;
};

class GpaStepper final : public Stepper {
 public:
  explicit GpaStepper(GpaState state) : state_(std::move(state)) {}
  void step(const GradOracle& oracle, double lr) override { gpa_step(state_, oracle, lr); }
  ParamVector eval_point() const override { return state_.eval_point; }
  ParamVector train_point() const override { return state_.train_point; }
  ParamVector base_point() const override { return state_.base_point; }

 private:
  GpaState state_;
};

class GpaMemStepper final : public Stepper {
 public:
  explicit GpaMemStepper(GpaMemState state) : state_(std::move(state)) {}
  void step(const GradOracle& oracle, double lr) override { gpa_mem_step(state_, oracle, lr); }
  ParamVector eval_point() const override { return state_.eval_point(); }
  ParamVector train_point() const override { return state_.train_point(); }
  ParamVector base_point() const override { return state_.base_point; }

 private:
  GpaMemState state_;
};

class DilocoStepper final : public Stepper {
 public:
  explicit DilocoStepper(DilocoState state) : state_(std::move(state)) {}
  void step(const GradOracle& oracle, double lr) override { diloco_step(state_, oracle, lr); }
  ParamVector eval_point() const override { return state_.outer; }
  ParamVector train_point() const override { return state_.inner; }
  ParamVector base_point() const override { return state_.inner; }

 private:
  DilocoState state_;
};

class ScheduleFreeStepper final : public Stepper {
 public:
  explicit ScheduleFreeStepper(ScheduleFreeState state) : state_(std::move(state)) {}
  void step(const GradOracle& oracle, double) override { schedule_free_step(state_, oracle); }
  ParamVector eval_point() const override { return state_.avg; }
  ParamVector train_point() const override {
    return blend(state_.interp, state_.avg, state_.base_point);
  }
  ParamVector base_point() const override { return state_.base_point; }

 private:
  ScheduleFreeState state_;
};

template <typename State, void (*StepFn)(State&, const GradOracle&)>
class ConstantLrStepper final : public Stepper {
 public:
  explicit ConstantLrStepper(State state) : state_(std::move(state)) {}
  void step(const GradOracle& oracle, double lr) override {
    state_.lr = lr;
    StepFn(state_, oracle);
  }
  ParamVector eval_point() const override {
    if constexpr (requires { state_.iterate; }) {
      return state_.iterate;
    } else {
      return state_.avg;
    }
  }
  ParamVector base_point() const override {
    if constexpr (requires { state_.base; }) {
      return state_.base;
    } else {
      return eval_point();
    }
  }

 private:
  State state_;
};

std::unique_ptr<Stepper> build_stepper(const RunConfig& cfg, ParamVector x0) {
  const Eigen::Index dim = x0.size();
  auto base = build_base(cfg.optimizer, dim);
  const ClipSpec clip = build_clip(cfg.optimizer);
  const double wd = cfg.optimizer.weight_decay;
  const OptimizerSpec& o = cfg.optimizer;
  switch (cfg.method) {
    case Method::kBase:
      return std::make_unique<BaseStepper>(std::move(x0), std::move(base), wd, clip);
    case Method::kGpa:
      return std::make_unique<GpaStepper>(
          GpaState(std::move(x0), *o.mu_x, *o.mu_y, std::move(base), wd, clip));
    case Method::kGpaMem:
      return std::make_unique<GpaMemStepper>(
          GpaMemState(std::move(x0), *o.mu_x, *o.mu_y, std::move(base), wd, clip));
    case Method::kDiloco:
      return std::make_unique<DilocoStepper>(DilocoState(
          std::move(x0), *o.outer_momentum, *o.outer_lr, *o.H, std::move(base), wd, clip));
    case Method::kScheduleFree:
      return std::make_unique<ScheduleFreeStepper>(
          ScheduleFreeState(std::move(x0), *o.sf_beta, cfg.schedule.peak_lr, std::move(base), wd,
                            clip, cfg.schedule.warmup_steps()));
    case Method::kNesterovModern:
      return std::make_unique<ConstantLrStepper<NesterovModernState, nesterov_modern_step>>(
          NesterovModernState(std::move(x0), *o.mu, cfg.schedule.peak_lr));
    case Method::kNesterovSutskever:
      return std::make_unique<ConstantLrStepper<NesterovSutskeverState, nesterov_sutskever_step>>(
          NesterovSutskeverState(std::move(x0), *o.mu, cfg.schedule.peak_lr));
    case Method::kNesterovPrimal:
      return std::make_unique<ConstantLrStepper<NesterovPrimalState, nesterov_primal_step>>(
          NesterovPrimalState(std::move(x0), *o.mu, cfg.schedule.peak_lr));
    case Method::kPolyakModern:
      return std::make_unique<ConstantLrStepper<PolyakModernState, polyak_modern_step>>(
          PolyakModernState(std::move(x0), *o.mu, cfg.schedule.peak_lr));
    case Method::kPolyakPrimal:
      return std::make_unique<ConstantLrStepper<PolyakPrimalState, polyak_primal_step>>(
          PolyakPrimalState(std::move(x0), *o.mu, cfg.schedule.peak_lr));
  }
  throw std::logic_error("unreachable");
}

}  // namespace

RunRecord run(const RunConfig& config) {
  config.validate();
  const auto problem = build_problem(config.problem);
  ParamVector x0 = initial_point(config.problem, problem->dim(), config.seed);
  auto stepper = build_stepper(config, std::move(x0));
  RngStream grad_rng(config.seed, kGradStream);
  const GradOracle oracle = [&](const ParamVector& p) { return problem->gradient(p, grad_rng); };
  const auto opt = problem->optimum();
  const auto start = std::chrono::steady_clock::now();

  RunRecord record;
  for (std::int64_t t = 1; t <= config.schedule.total_steps; ++t) {
    const double lr = schedule_value(config.schedule, t);
    try {
      stepper->step(oracle, lr);
    } catch (const std::runtime_error&) {
      record.diverged = true;
      break;
    }
    if (t % config.eval_every == 0 || t == config.schedule.total_steps) {
      EvalRow row;
      row.step = t;
      row.lr = lr;
      const ParamVector x = stepper->eval_point();
      row.loss_x = problem->loss(x);
      row.loss_y = problem->loss(stepper->train_point());
      row.loss_z = problem->loss(stepper->base_point());
      if (opt.has_value()) row.dist_opt = (x - *opt).norm();
      if (config.record_wall_time) {
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      }
      if (!std::isfinite(row.loss_x) || !std::isfinite(row.loss_y) ||
          !std::isfinite(row.loss_z)) {
        record.diverged = true;
        break;
      }
      record.rows.push_back(std::move(row));
    }
  }
  if (!config.output_path.empty()) write_csv(record, config.output_path);
  return record;
}

std::optional<std::int64_t> steps_to_target(const RunRecord& record, double target_loss) {
  for (const EvalRow& r : record.rows) {
    if (r.loss_x <= target_loss) return r.step;
  }
  return std::nullopt;
}

std::string SweepSummary::to_json() const {
  json arr = json::array();
  for (const SweepEntry& e : entries) {
    arr.push_back({{"name", e.name},
                   {"final_loss", e.final_loss},
                   {"best_loss", e.best_loss},
                   {"steps", e.steps},
                   {"diverged", e.diverged},
                   {"best", e.best}});
  }
  return json{{"runs", arr}}.dump(2);
}

std::string SweepSummary::to_table() const {
  std::ostringstream out;
  out << "name\tfinal_loss\tbest_loss\tsteps\tflags\n";
  for (const SweepEntry& e : entries) {
    out << e.name << '\t' << e.final_loss << '\t' << e.best_loss << '\t' << e.steps << '\t'
        << (e.diverged ? "DIVERGED" : (e.best ? "BEST" : "")) << '\n';
  }
  return out.str();
}

SweepSummary sweep(const std::vector<RunConfig>& grid, int threads) {
  if (grid.empty()) throw ConfigError("sweep: empty grid");
  if (threads < 1) threads = 1;
  std::vector<SweepEntry> entries(grid.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      try {
        const RunRecord record = run(grid[i]);
        SweepEntry e;
        e.name = grid[i].name;
        e.diverged = record.diverged;
        if (!record.rows.empty()) {
          e.final_loss = record.final_loss();
          e.best_loss = record.best_loss();
          e.steps = record.last_step();
        } else {
          e.final_loss = std::numeric_limits<double>::infinity();
          e.best_loss = std::numeric_limits<double>::infinity();
          e.steps = 0;
        }
        entries[i] = std::move(e);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(threads, static_cast<int>(grid.size()));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (failed.load()) throw std::runtime_error("sweep: run failed: " + failure);

  std::sort(entries.begin(), entries.end(), [](const SweepEntry& a, const SweepEntry& b) {
    if (a.diverged != b.diverged) return !a.diverged;  // divergent rows sort last
    if (a.final_loss != b.final_loss) return a.final_loss < b.final_loss;
    return a.name < b.name;
  });
  for (SweepEntry& e : entries) {
    if (!e.diverged) {
      e.best = true;
      break;
    }
  }
  SweepSummary summary;
  summary.entries = std::move(entries);
  return summary;
}

std::string CompareReport::to_table() const {
  std::ostringstream out;
  out << "baseline " << baseline << ": final_loss=" << baseline_final_loss
      << " steps=" << baseline_steps << '\n';
  for (const CompareEntry& e : entries) {
    out << e.name << '\t';
    if (e.speedup_percent.has_value()) {
      out << *e.speedup_percent << "%\n";
    } else {
      out << "no speedup\n";
    }
  }
  return out.str();
}

CompareReport compare(const std::map<std::string, RunRecord>& records,
                      const std::string& baseline) {
  const auto it = records.find(baseline);
  if (it == records.end()) throw std::invalid_argument("compare: baseline not found: " + baseline);
  const RunRecord& base = it->second;
  if (base.diverged) throw std::runtime_error("compare: baseline diverged");
  if (base.rows.empty()) throw std::runtime_error("compare: baseline has no rows");

  CompareReport report;
  report.baseline = baseline;
  report.baseline_final_loss = base.final_loss();
  report.baseline_steps = base.last_step();
  for (const auto& [name, record] : records) {
    if (name == baseline) continue;
    CompareEntry e;
    e.name = name;
    const auto s = steps_to_target(record, report.baseline_final_loss);
    if (s.has_value()) {
      e.speedup_percent =
          100.0 * (1.0 - static_cast<double>(*s) / static_cast<double>(report.baseline_steps));
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

namespace {

constexpr char kCheckpointMagic[8] = {'G', 'P', 'A', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void write_vector(std::ostream& out, const ParamVector& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
}

ParamVector read_vector(std::istream& in, Eigen::Index dim) {
  ParamVector v(dim);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(dim)));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_gpa_checkpoint(const GpaState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod(out, static_cast<std::uint64_t>(state.eval_point.size()));
  write_vector(out, state.eval_point);
  write_vector(out, state.train_point);
  write_vector(out, state.base_point);
  write_pod(out, state.mu_x);
  write_pod(out, state.mu_y);
  write_pod(out, state.weight_decay);
  write_pod(out, static_cast<std::uint8_t>(state.clip.enabled ? 1 : 0));
  write_pod(out, state.clip.max_norm);
  write_pod(out, static_cast<std::int64_t>(state.step));
  const auto* adamw = dynamic_cast<const AdamWOptimizer*>(state.base.get());
  write_pod(out, static_cast<std::uint8_t>(adamw ? 1 : 0));
  if (adamw) {
    const AdamWState& s = adamw->state();
    write_pod(out, s.beta1);
    write_pod(out, s.beta2);
    write_pod(out, s.eps);
    write_pod(out, static_cast<std::uint64_t>(s.step));
    write_vector(out, s.exp_avg);
    write_vector(out, s.exp_avg_sq);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

GpaState load_gpa_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic/version in " + path);
  }
  const auto dim = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in));
  ParamVector eval_point = read_vector(in, dim);
  ParamVector train_point = read_vector(in, dim);
  ParamVector base_point = read_vector(in, dim);
  const double mu_x = read_pod<double>(in);
  const double mu_y = read_pod<double>(in);
  const double weight_decay = read_pod<double>(in);
  const bool clip_enabled = read_pod<std::uint8_t>(in) != 0;
  const double clip_norm = read_pod<double>(in);
  const std::int64_t step = read_pod<std::int64_t>(in);
  const bool is_adamw = read_pod<std::uint8_t>(in) != 0;
  std::unique_ptr<BaseOptimizer> base;
  if (is_adamw) {
    const double beta1 = read_pod<double>(in);
    const double beta2 = read_pod<double>(in);
    const double eps = read_pod<double>(in);
    const auto base_step = read_pod<std::uint64_t>(in);
    AdamWState s(dim, beta1, beta2, eps);
    s.exp_avg = read_vector(in, dim);
    s.exp_avg_sq = read_vector(in, dim);
    s.step = base_step;
    base = std::make_unique<AdamWOptimizer>(std::move(s));
  } else {
    base = std::make_unique<SgdOptimizer>();
  }
  const ClipSpec clip = clip_enabled ? ClipSpec::at(clip_norm) : ClipSpec::disabled();
  GpaState state(eval_point, mu_x, mu_y, std::move(base), weight_decay, clip);
  state.train_point = std::move(train_point);
  state.base_point = std::move(base_point);
  state.step = step;
  return state;
}

}  // namespace gpa
