// Acceptance gate: every shipped guarantee is checked here, one line of
// output per criterion in the form "criterion N: PASS/FAIL (measured ...)".
// Tolerances are pinned next to each check. The process exit code is the
// number of failed checks, so ctest goes red if any guarantee is missed.
// Run with --only N to execute a single criterion (11 = the bnn smoke run).

#include "dsvgd/baselines.hpp"
#include "dsvgd/config.hpp"
#include "dsvgd/dataset.hpp"
#include "dsvgd/experiment.hpp"
#include "dsvgd/federation.hpp"
#include "dsvgd/kde.hpp"
#include "dsvgd/metrics.hpp"
#include "dsvgd/models/blr.hpp"
#include "dsvgd/models/mixture.hpp"
#include "dsvgd/models/mlp.hpp"
#include "dsvgd/models/toy.hpp"
#include "dsvgd/svgd.hpp"

#include "helpers.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace dsvgd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

// Relative error with an absolute floor: |a - b| / max(1, |a|), maximized
// over components. The floor keeps near-zero components from demanding
// impossible precision out of finite differences.
double max_rel_err(const Vector& analytic, const Vector& numeric) {
  double worst = 0.0;
  for (Index j = 0; j < analytic.size(); ++j) {
    const double denom = std::max(1.0, std::abs(analytic[j]));
    worst = std::max(worst, std::abs(analytic[j] - numeric[j]) / denom);
  }
  return worst;
}

double final_metric(const std::vector<RoundRecord>& rows, const std::string& name) {
  double value = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row.metric == name) value = row.value;
  }
  return value;
}

double first_metric(const std::vector<RoundRecord>& rows, const std::string& name) {
  for (const auto& row : rows) {
    if (row.metric == name) return row.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

fs::path scratch_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("dsvgd_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// --- criterion 1: toy posterior convergence -------------------------------

Outcome criterion_1() {
  ExperimentConfig cfg;
  cfg.set("protocol", "dsvgd");
  cfg.set("model", "toy1d");
  cfg.set("toy.prior", "gaussian");
  cfg.set("agents", "2");
  cfg.set("particles", "200");
  cfg.set("rounds", "10");
  cfg.set("local_steps", "200");
  cfg.set("distill_steps", "200");
  cfg.set("kde.bandwidth", "0.3");
  cfg.set("metrics", "kl");
  cfg.set("seed", "1");

  const ExperimentResult run = run_experiment(cfg);
  if (run.status != "ok") return {false, "federated run failed: " + run.error};
  const double kl_init = first_metric(run.rows, "kl");
  const double kl_final = final_metric(run.rows, "kl");

  // Centralized reference at matched compute: I*L = 2000 transport steps on
  // the exact posterior score, same particle count, same initialization.
  const ToyProblem toy = make_toy1d(true);
  Rng init_rng = Rng::derive(1, Stream::init);
  const Matrix init = toy.agents[0]->sample_prior(200, init_rng);
  FunctionScoreField field(
      [target = toy.posterior](const Matrix& pts) { return target.score_rows(pts); });
  TransportConfig tc;
  tc.options.mode = TransportOptions::StepMode::plain;
  tc.options.step_size = 0.05;
  tc.num_steps = 2000;
  const ParticleSet central = svgd_run(ParticleSet(init), field, tc);

  GridSpec grid;
  grid.axes.push_back({-6.0, 6.0, 601});
  auto log_target = [&](const Vector& x) { return toy.posterior.log_density(x); };
  const double kl_central = grid_kl(central, 0.3, log_target, grid);

  const bool ratio_ok = kl_final * 10.0 <= kl_init;             // (a) 10x drop
  const bool gap_ok = std::abs(kl_final - kl_central) <= 0.05;  // (b) 0.05 nats
  return {ratio_ok && gap_ok,
          fmt("kl_init=%.4f kl_final=%.4f drop=%.1fx (need 10x) kl_central=%.4f gap=%.4f "
              "(need <=0.05)",
              kl_init, kl_final, kl_init / kl_final, kl_central, std::abs(kl_final - kl_central))};
}

// --- criterion 2: single-particle protocol equals gradient ascent ---------

// Gaussian prior with a quadratic loss, all gradients exact, so the tilted
// local posterior is Gaussian and gradient ascent on its log density is
// available in closed form.
class QuadraticModel final : public LocalModel {
 public:
  Index dim() const override { return 1; }
  double prior_log_density(const Vector& theta) const override {
    return -0.5 * theta.squaredNorm();
  }
  Vector prior_score(const Vector& theta) const override { return -theta; }
  Matrix sample_prior(Index n, Rng& rng) const override {
    Matrix out(n, 1);
    for (Index i = 0; i < n; ++i) out(i, 0) = rng.normal();
    return out;
  }
  Matrix loss_grad_rows(const Matrix& points, Rng&) override {
    return (points.array() - 2.0).matrix();
  }
  double loss_value(const Vector& theta) const override {
    return 0.5 * (theta.array() - 2.0).square().sum();
  }
  Vector loss_grad_exact(const Vector& theta) const override {
    return (theta.array() - 2.0).matrix();
  }
};

Outcome criterion_2() {
  FederationConfig fc;
  fc.protocol = Protocol::pvi1;
  fc.num_particles = 1;
  fc.rounds = 20;
  fc.local_steps = 5;
  fc.distill_steps = 1;
  fc.alpha = 1.0;
  fc.kde_lambda = 0.5;
  fc.transport.mode = TransportOptions::StepMode::plain;
  fc.transport.step_size = 0.05;
  fc.transport.base_rate = 0.05;
  fc.distill_transport = fc.transport;
  fc.seed = 2;

  std::vector<LocalModelPtr> models = {std::make_shared<QuadraticModel>()};
  Federation fed(fc, models);

  // With one agent the cavity is always the prior, so every local step is
  // ascent on log p~(x) = log p0(x) - L(x): step = eps * (-x - (x - 2)).
  double x = fed.globals()(0, 0);
  double worst = 0.0;
  for (int round = 1; round <= fc.rounds; ++round) {
    fed.run_round();
    for (int step = 0; step < fc.local_steps; ++step) {
      x += 0.05 * (-x - (x - 2.0));
    }
    worst = std::max(worst, std::abs(fed.globals()(0, 0) - x));
  }
  const bool ok = worst < 1e-10;  // trajectory deviation over 100 steps
  return {ok, fmt("max |trajectory - gradient ascent| = %.3e over %d steps (need <1e-10)", worst,
                  fc.rounds * fc.local_steps)};
}

// --- criterion 3: score oracles against finite differences ----------------

Outcome criterion_3() {
  const double tol = 1e-5;      // mixture, blr, kde
  const double tol_mlp = 1e-4;  // deeper composition, looser FD floor
  double worst_mix = 0.0, worst_blr = 0.0, worst_mlp = 0.0, worst_kde = 0.0;

  {  // Mixture score in 2-D.
    std::vector<GaussianComponent> comps;
    Vector m1(2), m2(2), m3(2);
    m1 << 1.0, -0.5;
    m2 << -1.5, 0.5;
    m3 << 0.2, 2.0;
    comps.push_back(make_component(0.5, m1, (Matrix(2, 2) << 0.8, 0.2, 0.2, 0.6).finished()));
    comps.push_back(make_component(0.3, m2, (Matrix(2, 2) << 1.2, -0.3, -0.3, 0.9).finished()));
    comps.push_back(make_component(0.2, m3, (Matrix(2, 2) << 0.5, 0.0, 0.0, 1.5).finished()));
    const GaussianMixture mix(comps);
    Rng rng = Rng::derive(31, Stream::init, 1);
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(2);
      x << 2.5 * rng.normal(), 2.5 * rng.normal();
      const Vector analytic = mix.score(x);
      const Vector numeric = testing::fd_gradient([&](const Vector& p) { return mix.log_density(p); }, x);
      worst_mix = std::max(worst_mix, max_rel_err(analytic, numeric));
    }
  }

  {  // Bayesian logistic regression score, weights plus noise-scale coord.
    const Dataset data = make_separable_2d(40, 6);
    const BlrModel model{data.features(), 1.0, 0.01};
    const Minibatch batch{data.x, data.y, 1.0};
    Rng rng = Rng::derive(31, Stream::init, 2);
    for (int trial = 0; trial < 100; ++trial) {
      Vector theta(model.dim());
      for (Index j = 0; j < model.dim(); ++j) theta[j] = rng.normal();
      theta[model.feature_dim] = rng.uniform(-1.5, 1.5);
      const Vector analytic = blr_score(model, theta, batch, 1.0);
      const Vector numeric = testing::fd_gradient(
          [&](const Vector& p) { return blr_log_prior(model, p) - blr_loss(model, p, batch); },
          theta);
      worst_blr = std::max(worst_blr, max_rel_err(analytic, numeric));
    }
  }

  {  // MLP score on both tasks.
    const Dataset reg = make_sine_regression(30, 6);
    MlpModel mreg;
    mreg.input_dim = reg.features();
    mreg.hidden_dim = 4;
    mreg.output_dim = 1;
    mreg.task = MlpModel::Task::regression;
    const Minibatch reg_batch{reg.x, reg.y, 1.0};

    Dataset cls = make_separable_2d(30, 6);
    for (Index i = 0; i < cls.rows(); ++i) cls.y[i] = cls.y[i] > 0.0 ? 1.0 : 0.0;
    cls.task = TaskKind::multiclass;
    MlpModel mcls;
    mcls.input_dim = cls.features();
    mcls.hidden_dim = 4;
    mcls.output_dim = 2;
    mcls.task = MlpModel::Task::classification;
    const Minibatch cls_batch{cls.x, cls.y, 1.0};

    Rng rng = Rng::derive(31, Stream::init, 3);
    for (int trial = 0; trial < 50; ++trial) {
      Vector tr(mreg.dim());
      for (Index j = 0; j < tr.size(); ++j) tr[j] = 0.5 * rng.normal();
      const Vector ar = mlp_score(mreg, tr, reg_batch, 1.0);
      const Vector nr = testing::fd_gradient(
          [&](const Vector& p) { return mlp_log_prior(mreg, p) - mlp_loss(mreg, p, reg_batch); },
          tr);
      worst_mlp = std::max(worst_mlp, max_rel_err(ar, nr));

      Vector tc(mcls.dim());
      for (Index j = 0; j < tc.size(); ++j) tc[j] = 0.5 * rng.normal();
      const Vector ac = mlp_score(mcls, tc, cls_batch, 1.0);
      const Vector nc = testing::fd_gradient(
          [&](const Vector& p) { return mlp_log_prior(mcls, p) - mlp_loss(mcls, p, cls_batch); },
          tc);
      worst_mlp = std::max(worst_mlp, max_rel_err(ac, nc));
    }
  }

  {  // KDE score.
    Rng rng = Rng::derive(31, Stream::init, 4);
    Matrix centers(20, 2);
    for (Index i = 0; i < centers.rows(); ++i)
      for (Index j = 0; j < 2; ++j) centers(i, j) = 1.5 * rng.normal();
    const GaussianKde kde(centers, 0.4);
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(2);
      x << 2.0 * rng.normal(), 2.0 * rng.normal();
      const Vector analytic = kde.score(x);
      const Vector numeric =
          testing::fd_gradient([&](const Vector& p) { return kde.log_density(p); }, x);
      worst_kde = std::max(worst_kde, max_rel_err(analytic, numeric));
    }
  }

  const bool ok =
      worst_mix < tol && worst_blr < tol && worst_mlp < tol_mlp && worst_kde < tol;
  return {ok, fmt("max rel err: mixture=%.2e blr=%.2e (need <1e-5) mlp=%.2e (need <1e-4) "
                  "kde=%.2e (need <1e-5)",
                  worst_mix, worst_blr, worst_mlp, worst_kde)};
}

// --- criterion 4: moment recovery on a plain Gaussian ---------------------

Outcome criterion_4() {
  Rng rng = Rng::derive(7, Stream::init, 0);
  Matrix init(100, 1);
  for (Index i = 0; i < init.rows(); ++i) init(i, 0) = rng.normal();

  // Target N(3, 2^2): score = -(x - 3) / 4.
  FunctionScoreField field([](const Matrix& pts) { return ((-(pts.array() - 3.0)) / 4.0).matrix(); });
  TransportConfig tc;
  tc.options.mode = TransportOptions::StepMode::adagrad;
  tc.options.base_rate = 0.05;
  tc.num_steps = 1000;
  const ParticleSet out = svgd_run(ParticleSet(init), field, tc);

  const double mean = out.positions().col(0).mean();
  const double sd = std::sqrt((out.positions().col(0).array() - mean).square().sum() /
                              (out.positions().rows() - 1.0));
  const bool ok = std::abs(mean - 3.0) < 0.1 && std::abs(sd - 2.0) < 0.2;
  return {ok, fmt("mean=%.4f (need |mean-3|<0.1) std=%.4f (need |std-2|<0.2)", mean, sd)};
}

// --- criterion 5: incremental likelihood-score recursion audit ------------

Outcome criterion_5() {
  const double lambda = 0.3;
  ToyProblem toy = make_toy1d(true);
  FederationConfig fc;
  fc.protocol = Protocol::udsvgd;
  fc.num_particles = 50;
  fc.rounds = 6;
  fc.local_steps = 50;
  fc.distill_steps = 50;
  fc.alpha = 1.0;
  fc.kde_lambda = lambda;
  fc.transport.mode = TransportOptions::StepMode::plain;
  fc.transport.step_size = 0.05;
  fc.transport.base_rate = 0.05;
  fc.distill_transport = fc.transport;
  fc.seed = 5;

  Federation fed(fc, toy.agents);
  const Matrix probes = testing::linspace_rows(-3.0, 3.0, 50);
  double worst = 0.0;
  for (int round = 1; round <= fc.rounds; ++round) {
    fed.run_round();
    for (int id = 1; id <= fed.num_agents(); ++id) {
      const AgentStateU& agent = fed.agent_u(id);
      if (!agent.has_history()) continue;
      const Matrix incremental = agent.t_score_rows(probes);
      const Matrix recomputed = agent.t_score_recomputed_rows(probes, lambda);
      worst = std::max(worst, (incremental - recomputed).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = worst == 0.0;  // exact equality, not a tolerance
  return {ok, fmt("max |incremental - recomputed| = %.3e at 50 probes over 6 rounds (need 0)",
                  worst)};
}

// --- criterion 6: distillation fidelity after round 1 ---------------------

Outcome criterion_6() {
  const double lambda = 0.3;
  ToyProblem toy = make_toy1d(true);
  FederationConfig fc;
  fc.protocol = Protocol::dsvgd;
  fc.num_particles = 100;
  fc.rounds = 1;
  fc.local_steps = 200;
  fc.distill_steps = 500;
  fc.alpha = 1.0;
  fc.kde_lambda = lambda;
  fc.transport.mode = TransportOptions::StepMode::plain;
  fc.transport.step_size = 0.05;
  fc.transport.base_rate = 0.05;
  fc.distill_transport = fc.transport;
  fc.distill_transport.step_size = 0.1;
  fc.distill_transport.base_rate = 0.1;
  fc.distill_transport.bandwidth_rule = TransportOptions::BandwidthRule::fixed;
  fc.distill_transport.fixed_bandwidth = 0.05;
  fc.seed = 6;

  Federation fed(fc, toy.agents);
  fed.run_round();
  const AgentStateD& agent = fed.agent_d(fed.scheduled_agent(1));
  if (!agent.has_distilled) return {false, "scheduled agent never distilled"};

  // After the first round t_k = q^(1) / q^(0) with the prior analytic, so the
  // distilled buffer's KDE score should match score(q^(1)) - score(q^(0)).
  const GaussianKde q_new(fed.globals(), lambda);
  const GaussianKde t_kde(agent.local_particles, lambda);
  const Matrix probes = testing::linspace_rows(-2.0, 2.0, 20);
  double worst = 0.0;
  for (Index i = 0; i < probes.rows(); ++i) {
    const Vector x = probes.row(i).transpose();
    const double target = q_new.score(x)[0] - toy.agents[0]->prior_score(x)[0];
    const double got = t_kde.score(x)[0];
    worst = std::max(worst, std::abs(got - target));
  }
  const bool ok = worst <= 0.1;  // absolute score tolerance at the probes
  return {ok, fmt("max |distilled score - target score| = %.4f at 20 probes (need <=0.1)", worst)};
}

// --- criterion 7: logistic regression at desk scale -----------------------

Outcome run_blr_pair(const std::string& synth, long rows, double gap_tol, bool need_absolute,
                     Outcome& out) {
  ExperimentConfig fed_cfg;
  fed_cfg.set("protocol", "dsvgd");
  fed_cfg.set("model", "blr");
  fed_cfg.set("dataset.synthetic", synth);
  fed_cfg.set("dataset.rows", std::to_string(rows));
  fed_cfg.set("agents", "2");
  fed_cfg.set("particles", "6");
  fed_cfg.set("rounds", "10");
  fed_cfg.set("local_steps", "200");
  fed_cfg.set("distill_steps", "200");
  fed_cfg.set("kde.bandwidth", "2.0");
  fed_cfg.set("metrics", "accuracy");
  fed_cfg.set("seed", "1");

  ExperimentConfig central_cfg = fed_cfg;
  central_cfg.set("protocol", "svgd");

  const ExperimentResult fed = run_experiment(fed_cfg);
  if (fed.status != "ok") {
    out = {false, synth + " federated run failed: " + fed.error};
    return out;
  }
  const ExperimentResult central = run_experiment(central_cfg);
  if (central.status != "ok") {
    out = {false, synth + " centralized run failed: " + central.error};
    return out;
  }

  const double acc_fed = final_metric(fed.rows, "accuracy");
  const double acc_central = final_metric(central.rows, "accuracy");
  const double gap = std::abs(acc_fed - acc_central);
  const bool absolute_ok = !need_absolute || acc_fed >= 0.9;
  out = {absolute_ok && gap <= gap_tol,
         fmt("%s: acc=%.4f central=%.4f gap=%.4f (need <=%.2f%s)", synth.c_str(), acc_fed,
             acc_central, gap, gap_tol, need_absolute ? ", acc>=0.9" : "")};
  return out;
}

Outcome criterion_7() {
  Outcome sep, cov;
  run_blr_pair("separable2d", 2000, 0.02, true, sep);
  run_blr_pair("covlike", 10000, 0.03, false, cov);
  return {sep.ok && cov.ok, sep.detail + " | " + cov.detail};
}

// --- criterion 8: calibration machinery ------------------------------------

Outcome criterion_8() {
  // Perfectly calibrated: each bin's accuracy equals its mean confidence.
  std::vector<double> conf_cal = {0.75, 0.75, 0.75, 0.75, 0.5, 0.5};
  std::vector<bool> correct_cal = {true, true, true, false, true, false};
  const double mce_cal = reliability_and_mce(conf_cal, correct_cal).mce;

  // Two populated bins: (confidence 0.6, accuracy 0.5) and (0.8, 0.9).
  std::vector<double> conf_two;
  std::vector<bool> correct_two;
  for (int i = 0; i < 10; ++i) {
    conf_two.push_back(0.6);
    correct_two.push_back(i < 5);
    conf_two.push_back(0.8);
    correct_two.push_back(i < 9);
  }
  const double mce_two = reliability_and_mce(conf_two, correct_two).mce;

  // 0.1 is asserted up to double rounding of the bin arithmetic.
  const bool ok = mce_cal == 0.0 && std::abs(mce_two - 0.1) <= 1e-12;
  return {ok, fmt("calibrated mce=%.17g (need 0), two-bin mce=%.17g (need 0.1 within 1e-12)",
                  mce_cal, mce_two)};
}

// --- criterion 9: baseline reductions and the annealing schedule ----------

Outcome criterion_9() {
  auto fresh_model = [] {
    const Dataset data = make_separable_2d(60, 5);
    const BlrModel spec{data.features(), 1.0, 0.01};
    return std::make_shared<BlrLocalModel>(spec, data, 20);
  };

  SgldOptions opts;
  opts.num_chains = 4;
  opts.a0 = 0.01;
  opts.alpha = 1.0;
  opts.seed = 3;
  const Matrix central_chains = sgld_run(*fresh_model(), opts, 12);
  std::vector<LocalModelPtr> solo = {fresh_model()};
  const Matrix federated_chains = dsgld_run(solo, opts, 3, 4);
  const double sgld_gap = (central_chains - federated_chains).cwiseAbs().maxCoeff();

  const std::uint64_t seed = 21;
  std::vector<LocalModelPtr> solo_avg = {fresh_model()};
  const Vector fed_theta = fedavg_run(solo_avg, 3, 10, 0.01, 1.0, seed);
  auto replay = fresh_model();
  Rng init_rng = Rng::derive(seed, Stream::init);
  Vector theta = replay->sample_prior(1, init_rng).row(0).transpose();
  Rng batch_rng = Rng::derive(seed, Stream::batch, 1);
  theta = sgd_run(*replay, theta, 30, 0.01, 1.0, batch_rng);
  const double fedavg_gap = (fed_theta - theta).cwiseAbs().maxCoeff();

  // a(t) = a0 * (0.5 + t)^(-0.55), checked over the first 10k steps.
  double worst_rate = 0.0;
  for (const double a0 : {0.01, 0.5, 3.0}) {
    for (int t = 0; t < 10000; ++t) {
      const double expect = a0 * std::pow(0.5 + static_cast<double>(t), -0.55);
      worst_rate = std::max(worst_rate, std::abs(annealed_rate(a0, t) - expect) / expect);
    }
  }

  const bool ok = sgld_gap == 0.0 && fedavg_gap == 0.0 && worst_rate <= 1e-15;
  return {ok, fmt("dsgld-vs-sgld gap=%.3e (need 0) fedavg-vs-sgd gap=%.3e (need 0) "
                  "annealed rel err=%.2e (need <=1e-15)",
                  sgld_gap, fedavg_gap, worst_rate)};
}

// --- criterion 10: byte-identical reruns -----------------------------------

// results.csv with the wall-clock column stripped from every data line.
std::string canonical_results(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      out << line << "\n";
      first = false;
      continue;
    }
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << "\n";
  }
  return out.str();
}

bool rerun_identical(ExperimentConfig cfg, const std::string& tag, std::string& err) {
  const fs::path root = scratch_dir("rerun_" + tag);
  cfg.set("out", (root / "a").string());
  const ExperimentResult a = run_experiment(cfg);
  cfg.set("out", (root / "b").string());
  const ExperimentResult b = run_experiment(cfg);
  if (a.status != "ok" || b.status != "ok") {
    err = tag + " run failed: " + a.error + b.error;
    return false;
  }
  const bool same = canonical_results(root / "a" / "results.csv") ==
                    canonical_results(root / "b" / "results.csv");
  fs::remove_all(root);
  if (!same) err = tag + " reruns differ";
  return same;
}

Outcome criterion_10() {
  std::string err;
  ExperimentConfig toy;
  toy.set("protocol", "dsvgd");
  toy.set("model", "toy1d");
  toy.set("toy.prior", "uniform");
  toy.set("particles", "40");
  toy.set("rounds", "3");
  toy.set("local_steps", "30");
  toy.set("distill_steps", "30");
  toy.set("seed", "9");
  const bool toy_ok = rerun_identical(toy, "toy", err);

  ExperimentConfig blr;
  blr.set("protocol", "dsvgd");
  blr.set("model", "blr");
  blr.set("dataset.synthetic", "separable2d");
  blr.set("dataset.rows", "300");
  blr.set("dataset.batch", "50");
  blr.set("particles", "4");
  blr.set("rounds", "3");
  blr.set("local_steps", "30");
  blr.set("distill_steps", "30");
  blr.set("seed", "9");
  const bool blr_ok = toy_ok && rerun_identical(blr, "blr", err);

  const bool ok = toy_ok && blr_ok;
  return {ok, ok ? "toy and blr results.csv byte-identical across reruns (timing excluded)"
                 : err};
}

// --- bnn smoke: regression error falls over the rounds ---------------------

Outcome bnn_smoke() {
  ExperimentConfig cfg;
  cfg.set("protocol", "dsvgd");
  cfg.set("model", "mlp");
  cfg.set("dataset.synthetic", "sine1d");
  cfg.set("dataset.rows", "400");
  cfg.set("dataset.normalization", "standardize");
  cfg.set("mlp.hidden", "16");
  cfg.set("agents", "2");
  cfg.set("particles", "20");
  cfg.set("rounds", "5");
  cfg.set("local_steps", "100");
  cfg.set("distill_steps", "100");
  cfg.set("metrics", "rmse");
  cfg.set("seed", "4");

  const ExperimentResult run = run_experiment(cfg);
  if (run.status != "ok") return {false, "run failed: " + run.error};
  const double rmse_init = first_metric(run.rows, "rmse");
  const double rmse_final = final_metric(run.rows, "rmse");
  const bool ok = rmse_final < rmse_init;
  return {ok, fmt("rmse %.4f -> %.4f over 5 rounds (need decreasing)", rmse_init, rmse_final)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0) only = std::atoi(argv[i + 1]);
  }

  struct Check {
    const char* label;
    std::function<Outcome()> fn;
  };
  const std::vector<Check> checks = {
      {"criterion  1", criterion_1}, {"criterion  2", criterion_2},
      {"criterion  3", criterion_3}, {"criterion  4", criterion_4},
      {"criterion  5", criterion_5}, {"criterion  6", criterion_6},
      {"criterion  7", criterion_7}, {"criterion  8", criterion_8},
      {"criterion  9", criterion_9}, {"criterion 10", criterion_10},
      {"bnn smoke   ", bnn_smoke},
  };

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (only > 0 && static_cast<int>(i + 1) != only) continue;
    Outcome out;
    try {
      out = checks[i].fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s: %s  (%s)\n", checks[i].label, out.ok ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
    if (!out.ok) ++failures;
  }
  return failures;
}
