#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>

#include "gpa/base_opt.hpp"
#include "gpa/clip.hpp"
#include "gpa/diagnostics.hpp"
#include "gpa/gpa.hpp"
#include "gpa/harness.hpp"
#include "gpa/momentum.hpp"
#include "gpa/problems.hpp"
#include "gpa/rng.hpp"
#include "gpa/schedule.hpp"
#include "gpa/verify.hpp"
#include "gpa/wrappers.hpp"

namespace py = pybind11;
using namespace gpa;

namespace {

std::unique_ptr<BaseOptimizer> build_base(const std::string& name, Eigen::Index dim,
                                          double beta1, double beta2, double eps) {
  if (name == "sgd") return std::make_unique<SgdOptimizer>();
  if (name == "adamw") return std::make_unique<AdamWOptimizer>(dim, beta1, beta2, eps);
  throw std::invalid_argument("base must be 'sgd' or 'adamw'");
}

ClipSpec build_clip(double clip_norm) {
  return clip_norm > 0.0 ? ClipSpec::at(clip_norm) : ClipSpec::disabled();
}

// Owning wrappers so python sees plain classes with step()/properties.
struct PyGpa {
  GpaState state;
  explicit PyGpa(GpaState s) : state(std::move(s)) {}
  static PyGpa make(ParamVector x0, double mu_x, double mu_y, const std::string& base,
                    double weight_decay, double clip_norm, double beta1, double beta2,
                    double eps) {
    const Eigen::Index dim = x0.size();
    return PyGpa(GpaState(std::move(x0), mu_x, mu_y, build_base(base, dim, beta1, beta2, eps),
                          weight_decay, build_clip(clip_norm)));
  }
  void step(const GradOracle& oracle, double lr) { gpa_step(state, oracle, lr); }
};

struct PyGpaMem {
  GpaMemState state;
  explicit PyGpaMem(GpaMemState s) : state(std::move(s)) {}
  static PyGpaMem make(ParamVector x0, double mu_x, double mu_y, const std::string& base,
                       double weight_decay, double clip_norm, double beta1, double beta2,
                       double eps) {
    const Eigen::Index dim = x0.size();
    return PyGpaMem(GpaMemState(std::move(x0), mu_x, mu_y,
                                build_base(base, dim, beta1, beta2, eps), weight_decay,
                                build_clip(clip_norm)));
  }
  void step(const GradOracle& oracle, double lr) { gpa_mem_step(state, oracle, lr); }
};

struct PyDiloco {
  DilocoState state;
  explicit PyDiloco(DilocoState s) : state(std::move(s)) {}
  static PyDiloco make(ParamVector x0, double momentum, double outer_lr,
                       std::int64_t inner_steps, const std::string& base, double weight_decay,
                       double clip_norm, double beta1, double beta2, double eps) {
    const Eigen::Index dim = x0.size();
    return PyDiloco(DilocoState(std::move(x0), momentum, outer_lr, inner_steps,
                                build_base(base, dim, beta1, beta2, eps), weight_decay,
                                build_clip(clip_norm)));
  }
  void step(const GradOracle& oracle, double lr) { diloco_step(state, oracle, lr); }
};

struct PyScheduleFree {
  ScheduleFreeState state;
  explicit PyScheduleFree(ScheduleFreeState s) : state(std::move(s)) {}
  static PyScheduleFree make(ParamVector x0, double interp, double lr, const std::string& base,
                             double weight_decay, double clip_norm, std::int64_t warmup_steps,
                             double beta1, double beta2, double eps) {
    const Eigen::Index dim = x0.size();
    return PyScheduleFree(ScheduleFreeState(std::move(x0), interp, lr,
                                            build_base(base, dim, beta1, beta2, eps),
                                            weight_decay, build_clip(clip_norm), warmup_steps));
  }
  void step(const GradOracle& oracle) { schedule_free_step(state, oracle); }
};

}  // namespace

PYBIND11_MODULE(gpabench, m) {
  m.doc() = "primal-averaging optimizers, reference momentum forms, and desk-scale benchmarks";

  py::class_<ScheduleSpec>(m, "ScheduleSpec")
      .def(py::init([](std::int64_t total_steps, double peak_lr, double warmup_fraction,
                       double min_fraction, const std::string& shape) {
             ScheduleSpec spec;
             spec.total_steps = total_steps;
             spec.peak_lr = peak_lr;
             spec.warmup_fraction = warmup_fraction;
             spec.min_fraction = min_fraction;
             spec.shape = schedule_shape_from_string(shape);
             spec.validate();
             return spec;
           }),
           py::arg("total_steps"), py::arg("peak_lr"), py::arg("warmup_fraction") = 0.0,
           py::arg("min_fraction") = 0.0, py::arg("shape") = "cosine")
      .def_readonly("total_steps", &ScheduleSpec::total_steps)
      .def_readonly("peak_lr", &ScheduleSpec::peak_lr)
      .def("warmup_steps", &ScheduleSpec::warmup_steps);
  m.def("schedule_value", &schedule_value, py::arg("spec"), py::arg("t"));

  m.def(
      "clip_gradient",
      [](const ParamVector& g, double max_norm) { return clip_gradient(g, ClipSpec::at(max_norm)); },
      py::arg("gradient"), py::arg("max_norm"));

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def("uniform", &RngStream::uniform)
      .def("normal", &RngStream::normal)
      .def("normal_vector", &RngStream::normal_vector, py::arg("dim"), py::arg("stddev") = 1.0);

  m.def("map_primal_to_modern", &map_primal_to_modern, py::arg("mu"), py::arg("lr_primal"));
  m.def("recover_modern_buffer", &recover_modern_buffer, py::arg("x_prev"), py::arg("x_next"),
        py::arg("mu"), py::arg("lr_primal"));
  m.def("map_diloco_to_gpa", &map_diloco_to_gpa, py::arg("mu"), py::arg("inner_steps"));
  m.def("to_eval_point", &to_eval_point, py::arg("train_point"), py::arg("base_point"),
        py::arg("mu_y"));
  m.def("to_train_point", &to_train_point, py::arg("eval_point"), py::arg("base_point"),
        py::arg("mu_y"));
  m.def("weighted_average_oracle", &weighted_average_oracle, py::arg("base_history"),
        py::arg("mu_x"));

  py::class_<Problem, std::shared_ptr<Problem>>(m, "Problem")
      .def_property_readonly("dim", &Problem::dim)
      .def("loss", &Problem::loss, py::arg("x"))
      .def("gradient", &Problem::gradient, py::arg("x"), py::arg("rng"))
      .def("exact_gradient", &Problem::exact_gradient, py::arg("x"))
      .def("bregman", &Problem::bregman, py::arg("a"), py::arg("b"))
      .def("optimum", [](const Problem& p) -> py::object {
        const auto opt = p.optimum();
        if (!opt.has_value()) return py::none();
        return py::cast(*opt);
      });

  py::class_<QuadraticProblem, Problem, std::shared_ptr<QuadraticProblem>>(m, "QuadraticProblem")
      .def(py::init<Eigen::MatrixXd, ParamVector, double>(), py::arg("a"), py::arg("b"),
           py::arg("noise_std") = 0.0)
      .def_static(
          "random",
          [](Eigen::Index dim, std::uint64_t seed, double eig_min, double eig_max,
             double noise_std) {
            RngStream rng(seed, 0);
            return QuadraticProblem::random(dim, rng, eig_min, eig_max, noise_std);
          },
          py::arg("dim"), py::arg("seed"), py::arg("eig_min") = 0.5, py::arg("eig_max") = 3.0,
          py::arg("noise_std") = 0.0);

  py::class_<LogisticProblem, Problem, std::shared_ptr<LogisticProblem>>(m, "LogisticProblem")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, double, Eigen::Index>(),
           py::arg("features"), py::arg("labels"), py::arg("l2_reg"), py::arg("batch_size"))
      .def_static(
          "synthetic",
          [](Eigen::Index n_samples, Eigen::Index dim, std::uint64_t seed, double l2_reg,
             Eigen::Index batch_size) {
            RngStream rng(seed, 0);
            return LogisticProblem::synthetic(n_samples, dim, rng, l2_reg, batch_size);
          },
          py::arg("n_samples"), py::arg("dim"), py::arg("seed"), py::arg("l2_reg") = 0.0,
          py::arg("batch_size") = 1)
      .def_static("from_csv", &LogisticProblem::from_csv, py::arg("path"), py::arg("l2_reg"),
                  py::arg("batch_size"));

  py::class_<RobustMedianProblem, Problem, std::shared_ptr<RobustMedianProblem>>(
      m, "RobustMedianProblem")
      .def(py::init<std::vector<double>>(), py::arg("targets"))
      .def("median", &RobustMedianProblem::median);

  m.def("finite_difference_gradient", &finite_difference_gradient, py::arg("problem"),
        py::arg("x"), py::arg("step") = 1e-5);

  py::class_<PyGpa>(m, "Gpa")
      .def(py::init(&PyGpa::make),
           py::arg("x0"), py::arg("mu_x"), py::arg("mu_y"), py::arg("base") = "sgd",
           py::arg("weight_decay") = 0.0, py::arg("clip_norm") = 0.0, py::arg("beta1") = 0.9,
           py::arg("beta2") = 0.999, py::arg("eps") = 1e-8)
      .def("step", &PyGpa::step, py::arg("oracle"), py::arg("lr"))
      .def_property_readonly("eval_point", [](const PyGpa& o) { return o.state.eval_point; })
      .def_property_readonly("train_point", [](const PyGpa& o) { return o.state.train_point; })
      .def_property_readonly("base_point", [](const PyGpa& o) { return o.state.base_point; })
      .def_property_readonly("step_count", [](const PyGpa& o) { return o.state.step; });

  py::class_<PyGpaMem>(m, "GpaMem")
      .def(py::init(&PyGpaMem::make),
           py::arg("x0"), py::arg("mu_x"), py::arg("mu_y"), py::arg("base") = "sgd",
           py::arg("weight_decay") = 0.0, py::arg("clip_norm") = 0.0, py::arg("beta1") = 0.9,
           py::arg("beta2") = 0.999, py::arg("eps") = 1e-8)
      .def("step", &PyGpaMem::step, py::arg("oracle"), py::arg("lr"))
      .def("to_eval_mode", [](PyGpaMem& o) { o.state.to_eval_mode(); })
      .def("to_train_mode", [](PyGpaMem& o) { o.state.to_train_mode(); })
      .def_property_readonly("eval_point", [](const PyGpaMem& o) { return o.state.eval_point(); })
      .def_property_readonly("train_point",
                             [](const PyGpaMem& o) { return o.state.train_point(); })
      .def_property_readonly("base_point", [](const PyGpaMem& o) { return o.state.base_point; });

  py::class_<PyDiloco>(m, "Diloco")
      .def(py::init(&PyDiloco::make),
           py::arg("x0"), py::arg("momentum"), py::arg("outer_lr"), py::arg("inner_steps"),
           py::arg("base") = "sgd", py::arg("weight_decay") = 0.0, py::arg("clip_norm") = 0.0,
           py::arg("beta1") = 0.9, py::arg("beta2") = 0.999, py::arg("eps") = 1e-8)
      .def("step", &PyDiloco::step, py::arg("oracle"), py::arg("lr"))
      .def_property_readonly("inner", [](const PyDiloco& o) { return o.state.inner; })
      .def_property_readonly("outer", [](const PyDiloco& o) { return o.state.outer; })
      .def_property_readonly("aux_buffer_count",
                             [](const PyDiloco& o) { return o.state.aux_buffer_count(); });

  py::class_<PyScheduleFree>(m, "ScheduleFree")
      .def(py::init(&PyScheduleFree::make),
           py::arg("x0"), py::arg("interp"), py::arg("lr"), py::arg("base") = "sgd",
           py::arg("weight_decay") = 0.0, py::arg("clip_norm") = 0.0,
           py::arg("warmup_steps") = 0, py::arg("beta1") = 0.9, py::arg("beta2") = 0.999,
           py::arg("eps") = 1e-8)
      .def("step", &PyScheduleFree::step, py::arg("oracle"))
      .def_property_readonly("avg", [](const PyScheduleFree& o) { return o.state.avg; })
      .def_property_readonly("base_point",
                             [](const PyScheduleFree& o) { return o.state.base_point; });

  py::class_<BoundLedger>(m, "BoundLedger")
      .def(py::init<const Problem&, ParamVector, double, double>(), py::arg("problem"),
           py::arg("x_star"), py::arg("mu_x"), py::arg("mu_y"), py::keep_alive<1, 2>())
      .def(
          "accumulate",
          [](BoundLedger& ledger, const ParamVector& eval_prev, const ParamVector& eval,
             const ParamVector& train, const ParamVector& base) {
            ledger.accumulate({eval_prev, eval, train, base});
          },
          py::arg("eval_prev"), py::arg("eval"), py::arg("train"), py::arg("base"))
      .def("check_bound",
           [](const BoundLedger& ledger) {
             const auto r = ledger.check_bound();
             return py::make_tuple(r.lhs, r.rhs, r.holds);
           })
      .def("to_json", &BoundLedger::to_json);

  m.def("fit_rate", [](std::vector<double> horizons, std::vector<double> gaps) {
    RateFit fit;
    fit.horizons = std::move(horizons);
    fit.gaps = std::move(gaps);
    return fit_rate(fit);
  });

  m.def(
      "run_config_json",
      [](const std::string& json_text) {
        RunConfig config = parse_run_config(json_text);
        config.output_path.clear();
        const RunRecord record = run(config);
        return py::make_tuple(to_csv(record), record.diverged);
      },
      py::arg("json_text"),
      "Run a JSON-configured experiment; returns (csv_text, diverged).");

  m.def("run_acceptance", []() {
    py::list out;
    for (const CriterionResult& r : run_acceptance()) {
      out.append(py::make_tuple(r.id, r.name, r.pass, r.detail));
    }
    return out;
  });
}
