#include "dsvgd/experiment.hpp"

#include "dsvgd/baselines.hpp"
#include "dsvgd/dataset.hpp"
#include "dsvgd/kde.hpp"
#include "dsvgd/metrics.hpp"
#include "dsvgd/models/blr.hpp"
#include "dsvgd/models/mlp.hpp"
#include "dsvgd/models/toy.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace dsvgd {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Sum of the agents' losses under the shared prior: the centralized model
// that baseline runs (svgd, sgld) target.
class SumModel final : public LocalModel {
 public:
  explicit SumModel(std::vector<LocalModelPtr> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) {
      throw std::invalid_argument("SumModel: need at least one part");
    }
  }

  Index dim() const override { return parts_.front()->dim(); }
  double prior_log_density(const Vector& theta) const override {
    return parts_.front()->prior_log_density(theta);
  }
  Vector prior_score(const Vector& theta) const override {
    return parts_.front()->prior_score(theta);
  }
  Matrix sample_prior(Index n, Rng& rng) const override {
    return parts_.front()->sample_prior(n, rng);
  }
  Matrix loss_grad_rows(const Matrix& points, Rng& rng) override {
    Matrix out = parts_.front()->loss_grad_rows(points, rng);
    for (std::size_t k = 1; k < parts_.size(); ++k) out += parts_[k]->loss_grad_rows(points, rng);
    return out;
  }
  double loss_value(const Vector& theta) const override {
    double total = 0.0;
    for (const auto& p : parts_) total += p->loss_value(theta);
    return total;
  }
  Vector loss_grad_exact(const Vector& theta) const override {
    Vector out = parts_.front()->loss_grad_exact(theta);
    for (std::size_t k = 1; k < parts_.size(); ++k) out += parts_[k]->loss_grad_exact(theta);
    return out;
  }
  std::optional<SupportBox> support() const override { return parts_.front()->support(); }

 private:
  std::vector<LocalModelPtr> parts_;
};

struct Problem {
  std::string model_name;
  bool is_toy = false;
  std::vector<LocalModelPtr> agents;
  LocalModelPtr centralized;
  std::function<double(const Vector&)> log_target;  // toys only
  Dataset test;
  NormStats stats;
  BlrModel blr;
  MlpModel mlp;
};

Dataset synth_dataset(const std::string& name, long rows, std::uint64_t seed) {
  if (name == "separable2d") return make_separable_2d(rows, seed);
  if (name == "covlike") return make_covertype_like(rows, seed);
  if (name == "sine1d") return make_sine_regression(rows, seed);
  throw std::invalid_argument("unknown synthetic dataset '" + name + "'");
}

// Seeded shuffle + head/tail split, mirroring the CSV loader's convention.
void split_train_test(const Dataset& all, double train_fraction, std::uint64_t seed,
                      Dataset& train, Dataset& test) {
  const Index m = all.rows();
  std::vector<Index> order(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng::derive(seed, Stream::split);
  for (Index i = m - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  const Index m_train = std::max<Index>(1, static_cast<Index>(std::llround(
                                               train_fraction * static_cast<double>(m))));
  auto take = [&](Index lo, Index hi) {
    Dataset d;
    d.task = all.task;
    d.x.resize(hi - lo, all.x.cols());
    d.y.resize(hi - lo);
    for (Index i = lo; i < hi; ++i) {
      d.x.row(i - lo) = all.x.row(order[static_cast<std::size_t>(i)]);
      d.y[i - lo] = all.y[order[static_cast<std::size_t>(i)]];
    }
    return d;
  };
  train = take(0, std::min(m_train, m));
  test = take(std::min(m_train, m), m);
  if (test.rows() == 0) test = train;  // degenerate split: evaluate in-sample
}

NormStats fit_standardize(const Dataset& train) {
  NormStats stats;
  stats.mode = "standardize";
  stats.x_mean = train.x.colwise().mean().transpose();
  stats.x_std.resize(train.x.cols());
  for (Index j = 0; j < train.x.cols(); ++j) {
    const double var =
        (train.x.col(j).array() - stats.x_mean[j]).square().sum() / static_cast<double>(train.rows());
    stats.x_std[j] = std::max(std::sqrt(var), 1e-12);
  }
  if (train.task == TaskKind::regression) {
    stats.y_mean = train.y.mean();
    const double var = (train.y.array() - stats.y_mean).square().sum() /
                       static_cast<double>(train.rows());
    stats.y_std = std::max(std::sqrt(var), 1e-12);
  }
  return stats;
}

// Softmax cross entropy needs 0-based class labels; binary sets carry -1/+1.
void relabel_binary_as_classes(Dataset& d) {
  for (Index i = 0; i < d.y.size(); ++i) d.y[i] = d.y[i] > 0.0 ? 1.0 : 0.0;
  d.task = TaskKind::multiclass;
}

Problem build_problem(const ExperimentConfig& cfg) {
  Problem pb;
  pb.model_name = cfg.get_string("model", "");
  pb.is_toy = pb.model_name == "toy1d" || pb.model_name == "toy2d";
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));

  if (pb.is_toy) {
    ToyProblem toy = pb.model_name == "toy1d"
                         ? make_toy1d(cfg.get_string("toy.prior", "gaussian") == "gaussian")
                         : make_toy2d();
    pb.agents = toy.agents;
    pb.centralized = std::make_shared<SumModel>(toy.agents);
    pb.log_target = [target = toy.posterior](const Vector& x) { return target.log_density(x); };
    return pb;
  }

  Dataset train;
  if (cfg.has("dataset.path")) {
    LoadSpec spec;
    const std::string label = cfg.get_string("dataset.label", "0");
    try {
      std::size_t pos = 0;
      const int col = std::stoi(label, &pos);
      if (pos == label.size()) {
        spec.label_col = col;
      } else {
        spec.label_col = label;
      }
    } catch (...) {
      spec.label_col = label;
    }
    spec.normalization = cfg.get_string("dataset.normalization", "none");
    spec.task = cfg.get_string("dataset.task", "auto");
    spec.train_fraction = cfg.get_double("dataset.split", 0.8);
    spec.seed = seed;
    spec.max_rows = cfg.get_long("dataset.max_rows", 0);
    LoadedData loaded = load_dataset(cfg.get_string("dataset.path", ""), spec);
    train = std::move(loaded.train);
    pb.test = std::move(loaded.test);
    pb.stats = loaded.stats;
  } else {
    long rows = cfg.get_long("dataset.rows", 1000);
    const long cap = cfg.get_long("dataset.max_rows", 0);
    if (cap > 0) rows = std::min(rows, cap);
    Dataset all = synth_dataset(cfg.get_string("dataset.synthetic", ""), rows, seed);
    split_train_test(all, cfg.get_double("dataset.split", 0.8), seed, train, pb.test);
    if (cfg.get_string("dataset.normalization", "none") == "standardize") {
      pb.stats = fit_standardize(train);
      apply_normalization(train, pb.stats);
      apply_normalization(pb.test, pb.stats);
    }
  }

  const int num_agents = static_cast<int>(cfg.get_long("agents", 2));
  const Index batch = cfg.get_long("dataset.batch", 100);

  if (pb.model_name == "blr") {
    if (train.task != TaskKind::binary) {
      throw std::invalid_argument("model blr needs binary -1/+1 labels");
    }
    pb.blr = BlrModel{train.features(), 1.0, 0.01};
    std::vector<Dataset> shards = partition_dataset(train, num_agents, seed);
    for (auto& shard : shards) {
      pb.agents.push_back(std::make_shared<BlrLocalModel>(pb.blr, std::move(shard), batch));
    }
    pb.centralized = std::make_shared<BlrLocalModel>(pb.blr, std::move(train), batch);
    return pb;
  }

  pb.mlp.input_dim = train.features();
  pb.mlp.hidden_dim = cfg.get_long("mlp.hidden", 50);
  if (train.task == TaskKind::regression) {
    pb.mlp.task = MlpModel::Task::regression;
    pb.mlp.output_dim = 1;
  } else {
    if (train.task == TaskKind::binary) {
      relabel_binary_as_classes(train);
      relabel_binary_as_classes(pb.test);
    }
    pb.mlp.task = MlpModel::Task::classification;
    pb.mlp.output_dim = std::max(train.num_classes(), pb.test.num_classes());
  }
  std::vector<Dataset> shards = partition_dataset(train, num_agents, seed);
  for (auto& shard : shards) {
    pb.agents.push_back(std::make_shared<MlpLocalModel>(pb.mlp, std::move(shard), batch));
  }
  pb.centralized = std::make_shared<MlpLocalModel>(pb.mlp, std::move(train), batch);
  return pb;
}

double default_rate(const Problem& pb) {
  if (pb.is_toy) return 0.05;
  if (pb.model_name == "blr") return 0.05;
  return 0.001;
}

double default_fudge(const Problem& pb) {
  if (pb.model_name == "mlp") return 1e-6;
  return 1e-9;
}

double default_kde_lambda(const Problem& pb) { return pb.is_toy ? 0.3 : 0.55; }

// Toy targets are low dimensional and well conditioned, so plain SVGD steps
// are the stable default there; normalized adagrad steps keep marching at the
// base rate even where the target field has gone flat or noisy, which lets
// particles escape through low-density regions. Dataset models keep adagrad.
TransportOptions transport_from_config(const ExperimentConfig& cfg, const Problem& pb) {
  TransportOptions opts;
  const std::string mode = cfg.get_string("transport.mode", pb.is_toy ? "plain" : "adagrad");
  opts.mode = mode == "plain" ? TransportOptions::StepMode::plain
                              : TransportOptions::StepMode::adagrad;
  const double rate = cfg.get_double("transport.rate", default_rate(pb));
  opts.step_size = cfg.get_double("transport.step_size", rate);
  opts.base_rate = rate;
  opts.momentum = cfg.get_double("transport.momentum", 0.9);
  opts.fudge = cfg.get_double("transport.fudge", default_fudge(pb));
  opts.bandwidth_rule = cfg.get_string("transport.bandwidth_rule", "median") == "fixed"
                            ? TransportOptions::BandwidthRule::fixed
                            : TransportOptions::BandwidthRule::median_per_step;
  opts.fixed_bandwidth = cfg.get_double("transport.fixed_h", 1.0);
  return opts;
}

GridSpec grid_from_config(const ExperimentConfig& cfg, const Problem& pb) {
  GridSpec grid;
  const int dims = pb.model_name == "toy2d" ? 2 : 1;
  const double lo = cfg.get_double("grid.lo", pb.model_name == "toy2d" ? -9.0 : -6.0);
  const double hi = cfg.get_double("grid.hi", pb.model_name == "toy2d" ? 9.0 : 6.0);
  const int points =
      static_cast<int>(cfg.get_long("grid.points", pb.model_name == "toy2d" ? 81 : 601));
  for (int a = 0; a < dims; ++a) grid.axes.push_back(GridSpec::Axis{lo, hi, points});
  return grid;
}

std::vector<std::string> metric_names(const ExperimentConfig& cfg, const Problem& pb) {
  std::string defaults;
  if (pb.is_toy) {
    defaults = "kl";
  } else if (pb.model_name == "blr" || pb.mlp.task == MlpModel::Task::classification) {
    defaults = "accuracy,loglik,mce";
  } else {
    defaults = "rmse";
  }
  std::vector<std::string> names;
  std::stringstream ss(cfg.get_string("metrics", defaults));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    names.push_back(item.substr(b, e - b + 1));
  }
  return names;
}

// Per-round prediction cache shared by the accuracy/loglik/mce/rmse hooks so
// the test sweep runs once per evaluated round.
struct PredCache {
  int round = -1;
  Matrix probs;
  Vector preds;
};

struct HookContext {
  Problem problem;
  double lambda = 0.55;
  bool point_estimate = false;  // fedavg: single point, plain plug-in predictive
  GridSpec grid;
  std::shared_ptr<PredCache> cache = std::make_shared<PredCache>();
};

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

void fill_predictions(const HookContext& ctx, const Matrix& particles, int round) {
  PredCache& cache = *ctx.cache;
  if (cache.round == round) return;
  cache.round = round;
  const Problem& pb = ctx.problem;
  const Index m = pb.test.rows();
  const ParticleSet set(particles);
  if (pb.model_name == "blr") {
    cache.probs.resize(m, 2);
    for (Index i = 0; i < m; ++i) {
      const Vector x = pb.test.x.row(i).transpose();
      double p1 = 0.0;
      if (ctx.point_estimate) {
        p1 = sigmoid(particles.row(0).head(pb.blr.feature_dim).dot(x));
      } else {
        p1 = blr_predictive_probit(set, ctx.lambda, x, pb.blr.feature_dim);
      }
      cache.probs(i, 0) = 1.0 - p1;
      cache.probs(i, 1) = p1;
    }
    return;
  }
  if (pb.mlp.task == MlpModel::Task::classification) {
    cache.probs.resize(m, pb.mlp.output_dim);
    for (Index i = 0; i < m; ++i) {
      cache.probs.row(i) =
          bnn_predictive_mean(set, pb.mlp, pb.test.x.row(i).transpose()).transpose();
    }
    return;
  }
  cache.preds.resize(m);
  for (Index i = 0; i < m; ++i) {
    cache.preds[i] = bnn_predictive_mean(set, pb.mlp, pb.test.x.row(i).transpose())[0];
  }
}

std::vector<MetricHook> build_hooks(const ExperimentConfig& cfg, const Problem& pb,
                                    bool point_estimate) {
  auto ctx = std::make_shared<HookContext>();
  ctx->problem = pb;
  ctx->lambda = cfg.get_double("kde.bandwidth", default_kde_lambda(pb));
  ctx->point_estimate = point_estimate;
  if (pb.is_toy) ctx->grid = grid_from_config(cfg, pb);

  std::vector<MetricHook> hooks;
  for (const std::string& name : metric_names(cfg, pb)) {
    if (name == "kl") {
      hooks.push_back({"kl", [ctx](const Matrix& particles, int) {
                         return grid_kl(ParticleSet(particles), ctx->lambda,
                                        ctx->problem.log_target, ctx->grid);
                       }});
    } else if (name == "mean") {
      hooks.push_back({"mean", [](const Matrix& particles, int) {
                         return particles.col(0).mean();
                       }});
    } else if (name == "accuracy") {
      hooks.push_back({"accuracy", [ctx](const Matrix& particles, int round) {
                         fill_predictions(*ctx, particles, round);
                         return classification_accuracy(ctx->cache->probs, ctx->problem.test.y,
                                                        ctx->problem.test.task);
                       }});
    } else if (name == "loglik") {
      hooks.push_back({"loglik", [ctx](const Matrix& particles, int round) {
                         fill_predictions(*ctx, particles, round);
                         const Problem& pb2 = ctx->problem;
                         if (pb2.test.task == TaskKind::regression) {
                           const Index m = pb2.test.rows();
                           double total = 0.0;
                           for (Index i = 0; i < m; ++i) {
                             const double r = ctx->cache->preds[i] - pb2.test.y[i];
                             total += -0.5 * std::log(2.0 * M_PI) - 0.5 * r * r;
                           }
                           return total / static_cast<double>(m);
                         }
                         return avg_log_likelihood(ctx->cache->probs, pb2.test.y, pb2.test.task);
                       }});
    } else if (name == "mce") {
      hooks.push_back({"mce", [ctx](const Matrix& particles, int round) {
                         fill_predictions(*ctx, particles, round);
                         const Matrix& probs = ctx->cache->probs;
                         const Vector& y = ctx->problem.test.y;
                         std::vector<double> conf;
                         std::vector<bool> correct;
                         conf.reserve(static_cast<std::size_t>(probs.rows()));
                         for (Index i = 0; i < probs.rows(); ++i) {
                           Index arg = 0;
                           probs.row(i).maxCoeff(&arg);
                           conf.push_back(probs(i, arg));
                           const Index truth = ctx->problem.test.task == TaskKind::binary
                                                   ? (y[i] > 0.0 ? 1 : 0)
                                                   : static_cast<Index>(y[i]);
                           correct.push_back(arg == truth);
                         }
                         return reliability_and_mce(conf, correct).mce;
                       }});
    } else if (name == "rmse") {
      hooks.push_back({"rmse", [ctx](const Matrix& particles, int round) {
                         fill_predictions(*ctx, particles, round);
                         return rmse_destandardized(ctx->cache->preds, ctx->problem.test.y,
                                                    ctx->problem.stats.y_mean,
                                                    ctx->problem.stats.y_std);
                       }});
    }
  }
  return hooks;
}

struct RunState {
  std::vector<RoundRecord> rows;
  std::string out_dir;
  int snapshot_every = 0;
  std::string protocol;

  void eval(const std::vector<MetricHook>& hooks, const Matrix& particles, int round, int agent,
            double elapsed) {
    for (const auto& hook : hooks) {
      rows.push_back(RoundRecord{round, agent, hook.name, hook.fn(particles, round), elapsed});
    }
  }

  void snapshot(const Matrix& particles, int round) {
    if (out_dir.empty() || snapshot_every < 1) return;
    if (round % snapshot_every != 0) return;
    write_snapshot(out_dir + "/snapshot_" + std::to_string(round) + ".txt", particles, round,
                   protocol);
  }
};

void run_federated(const ExperimentConfig& cfg, const Problem& pb,
                   const std::vector<MetricHook>& hooks, RunState& state) {
  FederationConfig fc;
  const std::string protocol = cfg.get_string("protocol", "dsvgd");
  fc.protocol = protocol == "dsvgd" ? Protocol::dsvgd
                : protocol == "udsvgd" ? Protocol::udsvgd
                                       : Protocol::pvi1;
  fc.num_particles = cfg.get_long("particles", 100);
  fc.rounds = static_cast<int>(cfg.get_long("rounds", 10));
  fc.local_steps = static_cast<int>(cfg.get_long("local_steps", 200));
  fc.distill_steps = static_cast<int>(cfg.get_long("distill_steps", 200));
  fc.alpha = cfg.get_double("alpha", 1.0);
  fc.kde_lambda = cfg.get_double("kde.bandwidth", default_kde_lambda(pb));
  fc.transport = transport_from_config(cfg, pb);
  fc.distill_transport = fc.transport;
  const double distill_rate = cfg.get_double(
      "transport.distill_rate", pb.is_toy ? 2.0 * fc.transport.base_rate : fc.transport.base_rate);
  fc.distill_transport.base_rate = distill_rate;
  fc.distill_transport.step_size = distill_rate;
  // The distillation kernel runs on a fixed bandwidth by default for toys:
  // the median heuristic is computed over the whole local buffer, so a few
  // outlying particles inflate it and the widened kernel drags the bulk.
  const double distill_h = cfg.get_double("transport.distill_fixed_h", pb.is_toy ? 1.0 : 0.0);
  if (distill_h > 0.0) {
    fc.distill_transport.bandwidth_rule = TransportOptions::BandwidthRule::fixed;
    fc.distill_transport.fixed_bandwidth = distill_h;
  }
  fc.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));

  Federation fed(fc, pb.agents);
  const int eval_every = static_cast<int>(cfg.get_long("eval.every", 1));

  state.eval(hooks, fed.globals(), 0, 0, 0.0);
  state.snapshot(fed.globals(), 0);
  for (int i = 1; i <= fc.rounds; ++i) {
    const auto t0 = Clock::now();
    fed.run_round();
    const double elapsed = ms_since(t0);
    if (i % eval_every == 0 || i == fc.rounds) {
      const int agent = fed.scheduled_agent(i);
      state.eval(hooks, fed.globals(), i, agent, elapsed);
      if (fc.protocol == Protocol::pvi1) {
        const Vector eta = fed.pvi_eta();
        for (Index j = 0; j < eta.size(); ++j) {
          state.rows.push_back(
              RoundRecord{i, agent, "eta_" + std::to_string(j), eta[j], elapsed});
        }
      }
    }
    state.snapshot(fed.globals(), i);
  }
}

void run_centralized_svgd(const ExperimentConfig& cfg, const Problem& pb,
                          const std::vector<MetricHook>& hooks, RunState& state) {
  const Index n = cfg.get_long("particles", 100);
  const int rounds = static_cast<int>(cfg.get_long("rounds", 10));
  const int local_steps = static_cast<int>(cfg.get_long("local_steps", 200));
  const int eval_every = static_cast<int>(cfg.get_long("eval.every", 1));
  const double alpha = cfg.get_double("alpha", 1.0);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));

  TransportOptions opts = transport_from_config(cfg, pb);
  opts.base_rate /= static_cast<double>(n);
  opts.step_size /= static_cast<double>(n);

  Rng init_rng = Rng::derive(seed, Stream::init);
  Matrix particles = pb.centralized->sample_prior(n, init_rng);
  Rng batch_rng = Rng::derive(seed, Stream::batch, 0);
  TiltedField field(std::nullopt, nullptr, *pb.centralized, alpha, batch_rng);
  AdaGradMomentum opt(opts.base_rate, opts.momentum, opts.fudge);

  state.eval(hooks, particles, 0, 0, 0.0);
  state.snapshot(particles, 0);
  for (int i = 1; i <= rounds; ++i) {
    const auto t0 = Clock::now();
    TransportConfig tc{opts, local_steps, pb.centralized->support()};
    const ParticleSet moved = svgd_run(ParticleSet(particles), field, tc, opt);
    particles = moved.positions();
    const double elapsed = ms_since(t0);
    if (i % eval_every == 0 || i == rounds) state.eval(hooks, particles, i, 0, elapsed);
    state.snapshot(particles, i);
  }
}

void run_sgld(const ExperimentConfig& cfg, const Problem& pb,
              const std::vector<MetricHook>& hooks, RunState& state) {
  const int rounds = static_cast<int>(cfg.get_long("rounds", 10));
  const long local_steps = cfg.get_long("local_steps", 200);
  const int eval_every = static_cast<int>(cfg.get_long("eval.every", 1));
  SgldOptions opts;
  opts.num_chains = static_cast<int>(cfg.get_long("sgld.chains", cfg.get_long("particles", 100)));
  opts.a0 = cfg.get_double("sgld.a0", 0.01);
  opts.alpha = cfg.get_double("alpha", 1.0);
  opts.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));

  Rng init_rng = Rng::derive(opts.seed, Stream::init);
  const Matrix starts = pb.centralized->sample_prior(opts.num_chains, init_rng);
  state.eval(hooks, starts, 0, 0, 0.0);
  state.snapshot(starts, 0);

  auto t0 = Clock::now();
  sgld_run(*pb.centralized, opts, static_cast<long>(rounds) * local_steps, local_steps,
           [&](long step, const Matrix& positions) {
             const int round = static_cast<int>(step / local_steps);
             const double elapsed = ms_since(t0);
             if (round % eval_every == 0 || round == rounds) {
               state.eval(hooks, positions, round, 0, elapsed);
             }
             state.snapshot(positions, round);
             t0 = Clock::now();
           });
}

void run_dsgld(const ExperimentConfig& cfg, const Problem& pb,
               const std::vector<MetricHook>& hooks, RunState& state) {
  const int rounds = static_cast<int>(cfg.get_long("rounds", 10));
  const int trajectory = static_cast<int>(cfg.get_long("sgld.trajectory", 4));
  const int eval_every = static_cast<int>(cfg.get_long("eval.every", 1));
  const int k = static_cast<int>(pb.agents.size());
  SgldOptions opts;
  opts.num_chains = static_cast<int>(cfg.get_long("sgld.chains", cfg.get_long("particles", 100)));
  opts.a0 = cfg.get_double("sgld.a0", 0.01);
  opts.alpha = cfg.get_double("alpha", 1.0);
  opts.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));

  Rng init_rng = Rng::derive(opts.seed, Stream::init);
  const Matrix starts = pb.agents.front()->sample_prior(opts.num_chains, init_rng);
  state.eval(hooks, starts, 0, 0, 0.0);
  state.snapshot(starts, 0);

  auto t0 = Clock::now();
  dsgld_run(pb.agents, opts, rounds, trajectory, 1, [&](int round, const Matrix& positions) {
    const double elapsed = ms_since(t0);
    if (round % eval_every == 0 || round == rounds) {
      const int agent = (round - 1) % k + 1;
      state.eval(hooks, positions, round, agent, elapsed);
    }
    state.snapshot(positions, round);
    t0 = Clock::now();
  });
}

void run_fedavg(const ExperimentConfig& cfg, const Problem& pb,
                const std::vector<MetricHook>& hooks, RunState& state) {
  const int rounds = static_cast<int>(cfg.get_long("rounds", 10));
  const int local_steps = static_cast<int>(cfg.get_long("local_steps", 200));
  const int eval_every = static_cast<int>(cfg.get_long("eval.every", 1));
  const double rate = cfg.get_double("fedavg.rate", 0.001);
  const double alpha = cfg.get_double("alpha", 1.0);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));
  const int k = static_cast<int>(pb.agents.size());

  Rng init_rng = Rng::derive(seed, Stream::init);
  const Matrix start = pb.agents.front()->sample_prior(1, init_rng);
  state.eval(hooks, start, 0, 0, 0.0);
  state.snapshot(start, 0);

  auto t0 = Clock::now();
  fedavg_run(pb.agents, rounds, local_steps, rate, alpha, seed,
             [&](int round, const Vector& theta) {
               const double elapsed = ms_since(t0);
               if (round % eval_every == 0 || round == rounds) {
                 const int agent = (round - 1) % k + 1;
                 state.eval(hooks, theta.transpose(), round, agent, elapsed);
               }
               state.snapshot(theta.transpose(), round);
               t0 = Clock::now();
             });
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const ExperimentResult& result) {
  json j;
  j["version"] = "0.1.0";
  j["status"] = result.status;
  j["error"] = result.error;
  j["seed"] = cfg.get_long("seed", 0);
  json c = json::object();
  for (const auto& [key, value] : cfg.entries()) c[key] = value;
  j["config"] = c;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_results_csv(const std::string& path, const std::vector<RoundRecord>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << "round,agent,metric,value,elapsed_ms\n";
  char elapsed[40];
  for (const auto& row : rows) {
    std::snprintf(elapsed, sizeof(elapsed), "%.3f", row.elapsed_ms);
    out << row.round << "," << row.agent << "," << row.metric << "," << format_double(row.value)
        << "," << elapsed << "\n";
  }
}

void write_snapshot(const std::string& path, const Matrix& particles, int round,
                    const std::string& protocol) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << particles.rows() << " " << particles.cols() << " " << round << " " << protocol << "\n";
  for (Index i = 0; i < particles.rows(); ++i) {
    for (Index j = 0; j < particles.cols(); ++j) {
      if (j > 0) out << " ";
      out << format_double(particles(i, j));
    }
    out << "\n";
  }
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read '" + path + "'");
  }
  SnapshotData snap;
  Index n = 0;
  Index d = 0;
  if (!(in >> n >> d >> snap.round >> snap.protocol)) {
    throw std::runtime_error("snapshot '" + path + "': malformed header");
  }
  if (n < 1 || d < 1) {
    throw std::runtime_error("snapshot '" + path + "': bad dimensions in header");
  }
  snap.particles.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (!(in >> snap.particles(i, j))) {
        throw std::runtime_error("snapshot '" + path + "': truncated at row " +
                                 std::to_string(i + 1));
      }
    }
  }
  return snap;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string out_dir = cfg.get_string("out", "");
  if (!out_dir.empty()) fs::create_directories(out_dir);

  ExperimentResult result;
  RunState state;
  state.out_dir = out_dir;
  state.snapshot_every = static_cast<int>(cfg.get_long("snapshots.every", 0));
  state.protocol = cfg.get_string("protocol", "");

  try {
    const Problem pb = build_problem(cfg);
    const std::vector<MetricHook> hooks = build_hooks(cfg, pb, state.protocol == "fedavg");
    if (state.protocol == "dsvgd" || state.protocol == "udsvgd" || state.protocol == "pvi1") {
      run_federated(cfg, pb, hooks, state);
    } else if (state.protocol == "svgd") {
      run_centralized_svgd(cfg, pb, hooks, state);
    } else if (state.protocol == "sgld") {
      run_sgld(cfg, pb, hooks, state);
    } else if (state.protocol == "dsgld") {
      run_dsgld(cfg, pb, hooks, state);
    } else {
      run_fedavg(cfg, pb, hooks, state);
    }
  } catch (const std::exception& e) {
    result.status = "error";
    result.error = e.what();
  }

  result.rows = std::move(state.rows);
  if (!out_dir.empty()) {
    write_results_csv(out_dir + "/results.csv", result.rows);
    write_manifest(out_dir + "/manifest.json", cfg, result);
  }
  return result;
}

ExperimentResult run_toy_demo(const std::string& protocol, const std::string& out_dir,
                              std::uint64_t seed, long particles, long rounds, long steps) {
  ExperimentConfig cfg;
  cfg.set("protocol", protocol);
  cfg.set("model", "toy1d");
  cfg.set("toy.prior", "uniform");
  cfg.set("seed", std::to_string(seed));
  cfg.set("particles", protocol == "pvi1" ? "1" : std::to_string(particles));
  cfg.set("rounds", std::to_string(rounds));
  cfg.set("local_steps", std::to_string(steps));
  cfg.set("distill_steps", std::to_string(steps));
  cfg.set("metrics", protocol == "pvi1" ? "mean" : "kl");
  cfg.set("snapshots.every", "1");
  cfg.set("out", out_dir);
  if (protocol == "pvi1") cfg.set("transport.mode", "plain");

  ExperimentResult result = run_experiment(cfg);
  if (result.status != "ok") return result;

  const ToyProblem toy = make_toy1d(false);
  const int grid_points = 601;
  Vector grid(grid_points);
  Vector log_post(grid_points);
  for (int g = 0; g < grid_points; ++g) {
    grid[g] = -6.0 + 12.0 * static_cast<double>(g) / (grid_points - 1);
    Vector x(1);
    x[0] = grid[g];
    log_post[g] = toy.posterior.log_density(x);
  }
  const double dx = grid[1] - grid[0];

  auto normalized = [&](const Vector& log_vals) {
    Vector density(grid_points);
    for (int g = 0; g < grid_points; ++g) {
      density[g] = std::isinf(log_vals[g]) ? 0.0 : std::exp(log_vals[g]);
    }
    double mass = 0.0;
    for (int g = 0; g + 1 < grid_points; ++g) mass += 0.5 * dx * (density[g] + density[g + 1]);
    return Vector((density / mass).eval());
  };
  const Vector post = normalized(log_post);

  const double lambda = cfg.get_double("kde.bandwidth", 0.3);
  for (long i = 0; i <= rounds; ++i) {
    const std::string snap_path = out_dir + "/snapshot_" + std::to_string(i) + ".txt";
    if (!fs::exists(snap_path)) continue;
    const SnapshotData snap = read_snapshot(snap_path);
    const GaussianKde kde(snap.particles, lambda);
    Vector log_kde(grid_points);
    for (int g = 0; g < grid_points; ++g) {
      Vector x(1);
      x[0] = grid[g];
      log_kde[g] = kde.log_density(x);
    }
    const Vector q = normalized(log_kde);
    std::ofstream out(out_dir + "/kde_round_" + std::to_string(i) + ".csv");
    out << "theta,kde,posterior\n";
    for (int g = 0; g < grid_points; ++g) {
      out << format_double(grid[g]) << "," << format_double(q[g]) << "," << format_double(post[g])
          << "\n";
    }
  }
  return result;
}

}  // namespace dsvgd
