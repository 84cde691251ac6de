#include "dsvgd/baselines.hpp"
#include "dsvgd/experiment.hpp"
#include "dsvgd/kde.hpp"
#include "dsvgd/kernel.hpp"
#include "dsvgd/metrics.hpp"
#include "dsvgd/svgd.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace py = pybind11;
using namespace dsvgd;

namespace {

// Adapts a python callable mapping an (N, d) array of rows to an (N, d)
// array of scores into the ScoreField interface used by the transport loop.
class CallbackField final : public ScoreField {
 public:
  explicit CallbackField(py::function fn) : fn_(std::move(fn)) {}

  Matrix score_rows(const Matrix& points) override {
    Matrix scores = fn_(points).cast<Matrix>();
    if (scores.rows() != points.rows() || scores.cols() != points.cols()) {
      throw std::invalid_argument("score_fn: expected shape (" + std::to_string(points.rows()) +
                                  ", " + std::to_string(points.cols()) + "), got (" +
                                  std::to_string(scores.rows()) + ", " +
                                  std::to_string(scores.cols()) + ")");
    }
    return scores;
  }

 private:
  py::function fn_;
};

TransportConfig transport_from_args(long steps, const std::string& mode, double step_size,
                                    double base_rate, double momentum, double fudge,
                                    const std::variant<std::string, double>& bandwidth) {
  TransportConfig cfg;
  cfg.num_steps = steps;
  if (mode == "plain") {
    cfg.options.mode = TransportOptions::StepMode::plain;
  } else if (mode == "adagrad") {
    cfg.options.mode = TransportOptions::StepMode::adagrad;
  } else {
    throw std::invalid_argument("mode: expected 'plain' or 'adagrad', got '" + mode + "'");
  }
  cfg.options.step_size = step_size;
  cfg.options.base_rate = base_rate;
  cfg.options.momentum = momentum;
  cfg.options.fudge = fudge;
  if (std::holds_alternative<double>(bandwidth)) {
    cfg.options.bandwidth_rule = TransportOptions::BandwidthRule::fixed;
    cfg.options.fixed_bandwidth = std::get<double>(bandwidth);
  } else if (std::get<std::string>(bandwidth) == "median") {
    cfg.options.bandwidth_rule = TransportOptions::BandwidthRule::median_per_step;
  } else {
    throw std::invalid_argument("bandwidth: expected 'median' or a positive number, got '" +
                                std::get<std::string>(bandwidth) + "'");
  }
  return cfg;
}

py::dict result_to_dict(const ExperimentResult& result) {
  py::dict out;
  out["status"] = result.status;
  out["error"] = result.error;
  py::list rows;
  for (const auto& row : result.rows) {
    py::dict r;
    r["round"] = row.round;
    r["agent"] = row.agent;
    r["metric"] = row.metric;
    r["value"] = row.value;
    r["elapsed_ms"] = row.elapsed_ms;
    rows.append(r);
  }
  out["rows"] = rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Particle transport core: kernels, KDE, SVGD, federation runs, metrics";

  m.def(
      "median_bandwidth",
      [](const Matrix& positions) { return median_bandwidth(ParticleSet(positions)).value(); },
      py::arg("positions"));

  m.def(
      "rbf_kernel",
      [](const Vector& x, const Vector& y, double h) {
        const KernelEval eval = rbf_kernel_and_grad(x, y, Bandwidth(h));
        return py::make_tuple(eval.value, eval.grad_x);
      },
      py::arg("x"), py::arg("y"), py::arg("h"),
      "Returns (k(x, y), grad_x k) for k = exp(-||x - y||^2 / h).");

  m.def(
      "rbf_kernel_matrix",
      [](const Matrix& positions, double h) { return rbf_kernel_matrix(positions, Bandwidth(h)); },
      py::arg("positions"), py::arg("h"));

  m.def(
      "kde_log_density",
      [](const Matrix& query_rows, const Matrix& centers, double lam) {
        return GaussianKde(centers, lam).log_density_rows(query_rows);
      },
      py::arg("query_rows"), py::arg("centers"), py::arg("lam"));

  m.def(
      "kde_score",
      [](const Matrix& query_rows, const Matrix& centers, double lam) {
        return GaussianKde(centers, lam).score_rows(query_rows);
      },
      py::arg("query_rows"), py::arg("centers"), py::arg("lam"));

  m.def(
      "svgd_direction",
      [](const Matrix& positions, const Matrix& scores, double h) {
        return svgd_direction(positions, scores, Bandwidth(h));
      },
      py::arg("positions"), py::arg("scores"), py::arg("h"));

  m.def(
      "svgd_run",
      [](const Matrix& init, py::function score_fn, long steps, const std::string& mode,
         double step_size, double base_rate, double momentum, double fudge,
         const std::variant<std::string, double>& bandwidth) {
        CallbackField field(std::move(score_fn));
        const TransportConfig cfg =
            transport_from_args(steps, mode, step_size, base_rate, momentum, fudge, bandwidth);
        return svgd_run(ParticleSet(init), field, cfg).positions();
      },
      py::arg("init"), py::arg("score_fn"), py::arg("steps"), py::arg("mode") = "adagrad",
      py::arg("step_size") = 0.05, py::arg("base_rate") = 0.05, py::arg("momentum") = 0.9,
      py::arg("fudge") = 1e-6, py::arg("bandwidth") = "median",
      "Transports `init` along score_fn for `steps` SVGD steps and returns the particles.");

  m.def("annealed_rate", &annealed_rate, py::arg("a0"), py::arg("t"));

  m.def(
      "reliability_and_mce",
      [](const std::vector<double>& confidences, const std::vector<bool>& correct, int num_bins) {
        const ReliabilityResult result = reliability_and_mce(confidences, correct, num_bins);
        py::list bins;
        for (const auto& bin : result.bins) {
          py::dict b;
          b["lo"] = bin.lo;
          b["hi"] = bin.hi;
          b["count"] = bin.count;
          b["avg_confidence"] = bin.avg_confidence;
          b["accuracy"] = bin.accuracy;
          bins.append(b);
        }
        py::dict out;
        out["mce"] = result.mce;
        out["bins"] = bins;
        return out;
      },
      py::arg("confidences"), py::arg("correct"), py::arg("num_bins") = 10);

  m.def(
      "grid_kl",
      [](const Matrix& positions, double lam, py::function log_target,
         const std::vector<std::tuple<double, double, int>>& axes) {
        GridSpec grid;
        for (const auto& [lo, hi, points] : axes) {
          grid.axes.push_back({lo, hi, points});
        }
        const auto target = [&log_target](const Vector& x) {
          return log_target(x).cast<double>();
        };
        return grid_kl(ParticleSet(positions), lam, target, grid);
      },
      py::arg("positions"), py::arg("lam"), py::arg("log_target"), py::arg("axes"),
      "KL(kde(positions) || exp(log_target)) on a tensor grid of (lo, hi, points) axes.");

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& options) {
        ExperimentConfig cfg;
        for (const auto& [key, value] : options) {
          cfg.set(key, value);
        }
        return result_to_dict(run_experiment(cfg));
      },
      py::arg("options"),
      "Runs a protocol end to end from config key/value pairs; returns status, error and "
      "metric rows.");

  m.def(
      "run_toy_demo",
      [](const std::string& protocol, const std::string& out_dir, std::uint64_t seed,
         long particles, long rounds, long steps) {
        return result_to_dict(run_toy_demo(protocol, out_dir, seed, particles, rounds, steps));
      },
      py::arg("protocol"), py::arg("out_dir"), py::arg("seed") = 1, py::arg("particles") = 100,
      py::arg("rounds") = 3, py::arg("steps") = 100);
}
