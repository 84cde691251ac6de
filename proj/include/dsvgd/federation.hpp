#pragma once

#include "dsvgd/kde.hpp"
#include "dsvgd/models/local_model.hpp"
#include "dsvgd/svgd.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dsvgd {

enum class Protocol { dsvgd, udsvgd, pvi1 };

struct FederationConfig {
  Protocol protocol = Protocol::dsvgd;
  Index num_particles = 100;  // N
  int rounds = 10;            // I
  int local_steps = 200;      // L
  int distill_steps = 200;    // L'
  double alpha = 1.0;
  double kde_lambda = 0.55;
  TransportOptions transport;          // local free-energy loop
  TransportOptions distill_transport;  // distillation loop (epsilon')
  std::uint64_t seed = 0;
};

// Score of the tilted local target
//   p_hat(theta) = q^(i-1)(theta) / t_k^(i-1)(theta) * exp(-L_k(theta)/alpha):
//   score = score(q^(i-1)) - score(t_k^(i-1)) - loss_grad / alpha
// with q^(0) = p_0 (prior score) and t^(0) = 1 (zero score).
class TiltedField final : public ScoreField {
 public:
  using TScoreFn = std::function<Matrix(const Matrix&)>;

  TiltedField(std::optional<GaussianKde> q_prev, TScoreFn t_score, LocalModel& model,
              double alpha, Rng& batch_rng);

  Matrix score_rows(const Matrix& points) override;

 private:
  std::optional<GaussianKde> q_prev_;
  TScoreFn t_score_;
  LocalModel& model_;
  double alpha_;
  Rng& batch_rng_;
};

// Score of the distillation target
//   t_k^(i) = q^(i) / q^(i-1) * t_k^(i-1):
//   score = score(q^(i)) - score(q^(i-1)) + score(t_k^(i-1)).
// All three terms are fixed fields for the whole distillation loop; the
// t_k^(i-1) KDE is centered on the local buffer as it stood when the loop
// began. An empty t_prev means t^(i-1) = 1, contributing zero, and an empty
// q_prev resolves q^(i-1) to the analytic prior.
class DistillTargetField final : public ScoreField {
 public:
  using TScoreFn = std::function<Matrix(const Matrix&)>;

  DistillTargetField(GaussianKde q_new, std::optional<GaussianKde> q_prev, TScoreFn t_prev,
                     const LocalModel& model);

  Matrix score_rows(const Matrix& points) override;

 private:
  GaussianKde q_new_;
  std::optional<GaussianKde> q_prev_;
  TScoreFn t_prev_;
  const LocalModel& model_;
};

// One buffered participation: the downloaded and uploaded global snapshots
// of a round this agent was scheduled in.
struct SnapshotPair {
  int round = 0;
  Matrix before;  // theta^(round-1)
  Matrix after;   // theta^(round)
};

// Incrementally maintained score of the U-DSVGD approximate likelihood,
//   grad log t_k = sum_{j in I_k} [ score(q^(j)) - score(q^(j-1)) ],
// stored as a signed list of KDE terms (round 0 resolves to the prior).
// Adjacent terms from back-to-back scheduling cancel exactly and are
// deduplicated; rebuilds from the buffer replay the same rule, so the
// incremental and recomputed paths agree bit for bit.
class UdsvgdAccumulator {
 public:
  struct Entry {
    double sign = 1.0;
    int round = 0;          // 0 means the prior
    std::shared_ptr<const GaussianKde> kde;  // null for the prior
  };

  void add_round(const SnapshotPair& pair, double lambda);
  Matrix score_rows(const Matrix& points, const LocalModel& model) const;
  const std::vector<Entry>& entries() const { return entries_; }
  void clear() { entries_.clear(); }

 private:
  void push(double sign, int round, const Matrix& snapshot, double lambda);

  std::vector<Entry> entries_;
};

struct AgentStateU {
  int id = 0;  // 1-based
  LocalModelPtr model;
  Rng batch_rng{0};
  std::vector<SnapshotPair> buffer;
  UdsvgdAccumulator acc;

  void record_round(int round, Matrix before, Matrix after, double lambda);

  // Incremental accumulator.
  Matrix t_score_rows(const Matrix& points) const;
  // From-scratch replay over the buffer (audit path).
  Matrix t_score_recomputed_rows(const Matrix& points, double lambda) const;
  bool has_history() const { return !buffer.empty(); }
};

struct AgentStateD {
  int id = 0;  // 1-based
  LocalModelPtr model;
  Rng batch_rng{0};
  Matrix local_particles;
  bool has_distilled = false;

  Matrix t_score_rows(const Matrix& points, double lambda) const;
};

struct RoundRecord {
  int round = 0;
  int agent = 0;  // 0 = server/init rows
  std::string metric;
  double value = 0.0;
  double elapsed_ms = 0.0;
};

struct MetricHook {
  std::string name;
  std::function<double(const Matrix& particles, int round)> fn;
};

// Server plus scheduled agents. Rounds are 1-based and schedule agents
// round-robin: round i runs agent ((i-1) mod K) + 1.
class Federation {
 public:
  Federation(FederationConfig cfg, std::vector<LocalModelPtr> models);

  void run_round();
  void run(const std::vector<MetricHook>& hooks = {}, int eval_every = 1);

  const Matrix& globals() const { return globals_; }
  int completed_rounds() const { return round_; }
  int scheduled_agent(int round) const;  // 1-based
  int num_agents() const { return static_cast<int>(models_.size()); }
  const FederationConfig& config() const { return cfg_; }

  const std::vector<RoundRecord>& log() const { return log_; }
  std::vector<RoundRecord>& log() { return log_; }

  const AgentStateU& agent_u(int id) const;
  const AgentStateD& agent_d(int id) const;

  // Natural parameter implied by the single particle, eta = theta / lambda^2.
  Vector pvi_eta() const;

 private:
  FederationConfig cfg_;
  std::vector<LocalModelPtr> models_;
  Matrix globals_;
  int round_ = 0;
  std::vector<RoundRecord> log_;
  std::vector<AgentStateU> agents_u_;
  std::vector<AgentStateD> agents_d_;
};

}  // namespace dsvgd
