#include "dsvgd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dsvgd {

double annealed_rate(double a0, long t) {
  if (!(a0 > 0.0)) {
    throw std::invalid_argument("annealed_rate: a0 must be positive");
  }
  if (t < 0) {
    throw std::invalid_argument("annealed_rate: t must be non-negative");
  }
  return a0 * std::pow(0.5 + static_cast<double>(t), -0.55);
}

void sgld_step(Vector& position, const Vector& score, double rate, Rng& noise_rng,
               bool with_noise) {
  if (position.size() != score.size()) {
    throw std::invalid_argument("sgld_step: score dimension mismatch");
  }
  position += 0.5 * rate * score;
  if (with_noise) {
    const double std_dev = std::sqrt(rate);
    for (Index j = 0; j < position.size(); ++j) position[j] += std_dev * noise_rng.normal();
  }
}

namespace {

struct Chain {
  Vector position;
  Rng noise_rng{0};
  Rng batch_rng{0};
};

std::vector<Chain> init_chains(const LocalModel& model, int num_chains, std::uint64_t seed) {
  Rng init_rng = Rng::derive(seed, Stream::init);
  const Matrix starts = model.sample_prior(num_chains, init_rng);
  std::vector<Chain> chains(num_chains);
  for (int c = 0; c < num_chains; ++c) {
    chains[c].position = starts.row(c).transpose();
    chains[c].noise_rng = Rng::derive(seed, Stream::noise, static_cast<std::uint64_t>(c) + 1);
    chains[c].batch_rng = Rng::derive(seed, Stream::batch, static_cast<std::uint64_t>(c) + 1);
  }
  return chains;
}

Matrix positions_of(const std::vector<Chain>& chains) {
  Matrix out(static_cast<Index>(chains.size()), chains.front().position.size());
  for (std::size_t c = 0; c < chains.size(); ++c) out.row(static_cast<Index>(c)) = chains[c].position.transpose();
  return out;
}

void advance_chain(Chain& chain, LocalModel& model, double prior_weight, double alpha,
                   double rate, bool with_noise, long step, int chain_id) {
  const Matrix pt = chain.position.transpose();
  const Vector loss_grad = model.loss_grad_rows(pt, chain.batch_rng).row(0).transpose();
  const Vector score = prior_weight * model.prior_score(chain.position) - loss_grad / alpha;
  sgld_step(chain.position, score, rate, chain.noise_rng, with_noise);
  if (!chain.position.allFinite()) {
    throw std::runtime_error("sgld: chain " + std::to_string(chain_id) + " diverged at step " +
                             std::to_string(step));
  }
}

}  // namespace

Matrix sgld_run(LocalModel& model, const SgldOptions& opts, long total_steps, long hook_every,
                const SegmentHook& hook) {
  if (opts.num_chains < 1) {
    throw std::invalid_argument("sgld_run: num_chains must be >= 1");
  }
  if (total_steps < 1) {
    throw std::invalid_argument("sgld_run: total_steps must be >= 1");
  }
  std::vector<Chain> chains = init_chains(model, opts.num_chains, opts.seed);
  for (long t = 0; t < total_steps; ++t) {
    const double rate = annealed_rate(opts.a0, t);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      advance_chain(chains[c], model, 1.0, opts.alpha, rate, opts.with_noise, t,
                    static_cast<int>(c));
    }
    if (hook && hook_every > 0 && ((t + 1) % hook_every == 0 || t + 1 == total_steps)) {
      hook(t + 1, positions_of(chains));
    }
  }
  return positions_of(chains);
}

Matrix dsgld_run(const std::vector<LocalModelPtr>& models, const SgldOptions& opts, int rounds,
                 int trajectory_len, int hook_every_rounds,
                 const std::function<void(int round, const Matrix&)>& hook) {
  const int k = static_cast<int>(models.size());
  if (k < 1) {
    throw std::invalid_argument("dsgld_run: need at least one agent");
  }
  if (opts.num_chains < k) {
    throw std::invalid_argument("dsgld_run: need at least one chain per agent (" +
                                std::to_string(opts.num_chains) + " chains, " + std::to_string(k) +
                                " agents)");
  }
  if (rounds < 1 || trajectory_len < 1) {
    throw std::invalid_argument("dsgld_run: rounds and trajectory_len must be >= 1");
  }

  std::vector<Chain> chains = init_chains(*models.front(), opts.num_chains, opts.seed);
  const int per_agent = (opts.num_chains + k - 1) / k;  // ceil(N/K)
  const double prior_weight = 1.0 / static_cast<double>(k);

  for (int r = 0; r < rounds; ++r) {
    const int agent = r % k;
    const int lo = agent * per_agent;
    const int hi = std::min(opts.num_chains, lo + per_agent);
    for (int l = 0; l < trajectory_len; ++l) {
      const long t = static_cast<long>(r) * trajectory_len + l;
      const double rate = annealed_rate(opts.a0, t);
      for (int c = lo; c < hi; ++c) {
        advance_chain(chains[c], *models[agent], prior_weight, opts.alpha, rate, opts.with_noise,
                      t, c);
      }
    }
    if (hook && hook_every_rounds > 0 && ((r + 1) % hook_every_rounds == 0 || r + 1 == rounds)) {
      hook(r + 1, positions_of(chains));
    }
  }
  return positions_of(chains);
}

Vector sgd_run(LocalModel& model, Vector theta, long steps, double rate, double alpha,
               Rng& batch_rng) {
  if (steps < 1) {
    throw std::invalid_argument("sgd_run: steps must be >= 1");
  }
  if (!(rate > 0.0)) {
    throw std::invalid_argument("sgd_run: rate must be positive");
  }
  for (long t = 0; t < steps; ++t) {
    const Matrix pt = theta.transpose();
    const Vector loss_grad = model.loss_grad_rows(pt, batch_rng).row(0).transpose();
    theta += rate * (model.prior_score(theta) - loss_grad / alpha);
    if (!theta.allFinite()) {
      throw std::runtime_error("sgd_run: diverged at step " + std::to_string(t));
    }
  }
  return theta;
}

Vector fedavg_run(const std::vector<LocalModelPtr>& models, int rounds, int local_steps,
                  double rate, double alpha, std::uint64_t seed,
                  const std::function<void(int round, const Vector&)>& hook) {
  if (models.empty()) {
    throw std::invalid_argument("fedavg_run: need at least one agent");
  }
  if (rounds < 1 || local_steps < 1) {
    throw std::invalid_argument("fedavg_run: rounds and local_steps must be >= 1");
  }

  Rng init_rng = Rng::derive(seed, Stream::init);
  Vector theta = models.front()->sample_prior(1, init_rng).row(0).transpose();

  std::vector<Rng> batch_rngs;
  batch_rngs.reserve(models.size());
  for (std::size_t a = 0; a < models.size(); ++a) {
    batch_rngs.push_back(Rng::derive(seed, Stream::batch, a + 1));
  }

  for (int r = 0; r < rounds; ++r) {
    const int agent = r % static_cast<int>(models.size());
    try {
      theta = sgd_run(*models[agent], theta, local_steps, rate, alpha, batch_rngs[agent]);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("fedavg_run: round " + std::to_string(r + 1) + ": " + e.what());
    }
    if (hook) hook(r + 1, theta);
  }
  return theta;
}

}  // namespace dsvgd
