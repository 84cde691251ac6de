#include "dsvgd/federation.hpp"

#include <chrono>
#include <stdexcept>

namespace dsvgd {

TiltedField::TiltedField(std::optional<GaussianKde> q_prev, TScoreFn t_score, LocalModel& model,
                         double alpha, Rng& batch_rng)
    : q_prev_(std::move(q_prev)),
      t_score_(std::move(t_score)),
      model_(model),
      alpha_(alpha),
      batch_rng_(batch_rng) {
  if (!(alpha_ > 0.0)) {
    throw std::invalid_argument("TiltedField: alpha must be positive");
  }
}

Matrix TiltedField::score_rows(const Matrix& points) {
  Matrix s = q_prev_ ? q_prev_->score_rows(points) : model_.prior_score_rows(points);
  if (t_score_) s -= t_score_(points);
  s -= model_.loss_grad_rows(points, batch_rng_) / alpha_;
  return s;
}

DistillTargetField::DistillTargetField(GaussianKde q_new, std::optional<GaussianKde> q_prev,
                                       TScoreFn t_prev, const LocalModel& model)
    : q_new_(std::move(q_new)),
      q_prev_(std::move(q_prev)),
      t_prev_(std::move(t_prev)),
      model_(model) {}

Matrix DistillTargetField::score_rows(const Matrix& points) {
  Matrix s = q_new_.score_rows(points);
  s -= q_prev_ ? q_prev_->score_rows(points) : model_.prior_score_rows(points);
  if (t_prev_) s += t_prev_(points);
  return s;
}

void UdsvgdAccumulator::push(double sign, int round, const Matrix& snapshot, double lambda) {
  if (!entries_.empty() && entries_.back().round == round && entries_.back().sign == -sign) {
    entries_.pop_back();
    return;
  }
  Entry e;
  e.sign = sign;
  e.round = round;
  if (round > 0) e.kde = std::make_shared<GaussianKde>(snapshot, lambda);
  entries_.push_back(std::move(e));
}

void UdsvgdAccumulator::add_round(const SnapshotPair& pair, double lambda) {
  push(-1.0, pair.round - 1, pair.before, lambda);
  push(+1.0, pair.round, pair.after, lambda);
}

Matrix UdsvgdAccumulator::score_rows(const Matrix& points, const LocalModel& model) const {
  Matrix out = Matrix::Zero(points.rows(), points.cols());
  for (const Entry& e : entries_) {
    if (e.kde) {
      out += e.sign * e.kde->score_rows(points);
    } else {
      out += e.sign * model.prior_score_rows(points);
    }
  }
  return out;
}

void AgentStateU::record_round(int round, Matrix before, Matrix after, double lambda) {
  SnapshotPair pair{round, std::move(before), std::move(after)};
  acc.add_round(pair, lambda);
  buffer.push_back(std::move(pair));
}

Matrix AgentStateU::t_score_rows(const Matrix& points) const {
  return acc.score_rows(points, *model);
}

Matrix AgentStateU::t_score_recomputed_rows(const Matrix& points, double lambda) const {
  UdsvgdAccumulator replay;
  for (const SnapshotPair& pair : buffer) replay.add_round(pair, lambda);
  return replay.score_rows(points, *model);
}

Matrix AgentStateD::t_score_rows(const Matrix& points, double lambda) const {
  if (!has_distilled) return Matrix::Zero(points.rows(), points.cols());
  return GaussianKde(local_particles, lambda).score_rows(points);
}

Federation::Federation(FederationConfig cfg, std::vector<LocalModelPtr> models)
    : cfg_(cfg), models_(std::move(models)) {
  if (models_.empty()) {
    throw std::invalid_argument("Federation: need at least one agent model");
  }
  if (cfg_.num_particles < 1) {
    throw std::invalid_argument("Federation: num_particles must be >= 1");
  }
  if (cfg_.rounds < 1) {
    throw std::invalid_argument("Federation: rounds must be >= 1");
  }
  if (cfg_.local_steps < 1) {
    throw std::invalid_argument("Federation: local_steps must be >= 1");
  }
  if (cfg_.protocol == Protocol::dsvgd && cfg_.distill_steps < 1) {
    throw std::invalid_argument("Federation: distill_steps must be >= 1");
  }
  if (cfg_.protocol == Protocol::pvi1) {
    if (cfg_.num_particles != 1) {
      throw std::invalid_argument("Federation: pvi1 requires num_particles == 1");
    }
    if (cfg_.transport.mode != TransportOptions::StepMode::plain) {
      throw std::invalid_argument("Federation: pvi1 requires the plain step mode");
    }
  }
  for (const auto& m : models_) {
    if (m->dim() != models_.front()->dim()) {
      throw std::invalid_argument("Federation: agent model dimensions differ");
    }
  }

  Rng init_rng = Rng::derive(cfg_.seed, Stream::init);
  globals_ = models_.front()->sample_prior(cfg_.num_particles, init_rng);

  const int k = num_agents();
  if (cfg_.protocol == Protocol::dsvgd) {
    agents_d_.resize(k);
    for (int a = 0; a < k; ++a) {
      agents_d_[a].id = a + 1;
      agents_d_[a].model = models_[a];
      agents_d_[a].batch_rng = Rng::derive(cfg_.seed, Stream::batch, a + 1);
      agents_d_[a].local_particles = globals_;
    }
  } else {
    agents_u_.resize(k);
    for (int a = 0; a < k; ++a) {
      agents_u_[a].id = a + 1;
      agents_u_[a].model = models_[a];
      agents_u_[a].batch_rng = Rng::derive(cfg_.seed, Stream::batch, a + 1);
    }
  }
}

int Federation::scheduled_agent(int round) const {
  return (round - 1) % num_agents() + 1;
}

const AgentStateU& Federation::agent_u(int id) const {
  if (cfg_.protocol == Protocol::dsvgd) {
    throw std::logic_error("Federation: no U-state under the dsvgd protocol");
  }
  return agents_u_.at(id - 1);
}

const AgentStateD& Federation::agent_d(int id) const {
  if (cfg_.protocol != Protocol::dsvgd) {
    throw std::logic_error("Federation: no D-state outside the dsvgd protocol");
  }
  return agents_d_.at(id - 1);
}

Vector Federation::pvi_eta() const {
  if (cfg_.num_particles != 1) {
    throw std::logic_error("Federation: pvi_eta needs a single particle");
  }
  return globals_.row(0).transpose() / (cfg_.kde_lambda * cfg_.kde_lambda);
}

void Federation::run_round() {
  const int i = round_ + 1;
  const int k = scheduled_agent(i);
  LocalModel& model = *models_[k - 1];

  const Matrix snapshot = globals_;
  std::optional<GaussianKde> q_prev;
  if (i > 1) q_prev.emplace(snapshot, cfg_.kde_lambda);

  TiltedField::TScoreFn t_fn;
  Rng* batch_rng = nullptr;
  if (cfg_.protocol == Protocol::dsvgd) {
    AgentStateD& agent = agents_d_[k - 1];
    batch_rng = &agent.batch_rng;
    if (agent.has_distilled) {
      t_fn = [&agent, this](const Matrix& pts) { return agent.t_score_rows(pts, cfg_.kde_lambda); };
    }
  } else {
    AgentStateU& agent = agents_u_[k - 1];
    batch_rng = &agent.batch_rng;
    if (agent.has_history()) {
      t_fn = [&agent](const Matrix& pts) { return agent.t_score_rows(pts); };
    }
  }

  TiltedField field(q_prev, t_fn, model, cfg_.alpha, *batch_rng);
  TransportConfig tc{cfg_.transport, cfg_.local_steps, model.support()};
  Matrix updated;
  try {
    updated = svgd_run(ParticleSet(snapshot), field, tc).positions();
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("Federation: round " + std::to_string(i) + ", agent " +
                             std::to_string(k) + ": " + e.what());
  }
  globals_ = updated;

  if (cfg_.protocol == Protocol::dsvgd) {
    AgentStateD& agent = agents_d_[k - 1];
    // Before the first distillation t^(0) = 1 and the target carries no t
    // term; afterwards it is the KDE over the buffer as the loop begins.
    DistillTargetField::TScoreFn t_prev_fn;
    if (agent.has_distilled) {
      GaussianKde t_prev_kde(agent.local_particles, cfg_.kde_lambda);
      t_prev_fn = [t_prev_kde](const Matrix& pts) { return t_prev_kde.score_rows(pts); };
    }
    DistillTargetField target(GaussianKde(updated, cfg_.kde_lambda), q_prev,
                              std::move(t_prev_fn), model);
    TransportConfig dc{cfg_.distill_transport, cfg_.distill_steps, model.support()};
    try {
      agent.local_particles =
          svgd_run(ParticleSet(agent.local_particles), target, dc).positions();
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("Federation: round " + std::to_string(i) + ", agent " +
                               std::to_string(k) + ", distillation: " + e.what());
    }
    agent.has_distilled = true;
  } else {
    agents_u_[k - 1].record_round(i, snapshot, updated, cfg_.kde_lambda);
  }

  round_ = i;
}

void Federation::run(const std::vector<MetricHook>& hooks, int eval_every) {
  if (eval_every < 1) {
    throw std::invalid_argument("Federation: eval_every must be >= 1");
  }
  for (const MetricHook& hook : hooks) {
    log_.push_back(RoundRecord{0, 0, hook.name, hook.fn(globals_, 0), 0.0});
  }
  while (round_ < cfg_.rounds) {
    const auto start = std::chrono::steady_clock::now();
    run_round();
    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (round_ % eval_every == 0 || round_ == cfg_.rounds) {
      const int agent = scheduled_agent(round_);
      for (const MetricHook& hook : hooks) {
        log_.push_back(RoundRecord{round_, agent, hook.name, hook.fn(globals_, round_), elapsed});
      }
      if (cfg_.protocol == Protocol::pvi1) {
        const Vector eta = pvi_eta();
        for (Index j = 0; j < eta.size(); ++j) {
          log_.push_back(
              RoundRecord{round_, agent, "eta_" + std::to_string(j), eta[j], elapsed});
        }
      }
    }
  }
}

}  // namespace dsvgd
