#pragma once

#include "dsvgd/federation.hpp"
#include "dsvgd/models/local_model.hpp"

#include <functional>
#include <vector>

namespace dsvgd {

// a_t = a0 * (0.5 + t)^-0.55, t counted from zero.
double annealed_rate(double a0, long t);

// theta <- theta + (rate/2) * score + eta, eta ~ N(0, rate I).
void sgld_step(Vector& position, const Vector& score, double rate, Rng& noise_rng,
               bool with_noise = true);

struct SgldOptions {
  int num_chains = 50;
  double a0 = 0.01;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  bool with_noise = true;
};

using SegmentHook = std::function<void(long step, const Matrix& positions)>;

// Centralized SGLD: num_chains independent chains on the full posterior,
// advanced step-major for total_steps. The hook fires every hook_every steps
// (and at the end) with the current chain positions.
Matrix sgld_run(LocalModel& model, const SgldOptions& opts, long total_steps,
                long hook_every = 0, const SegmentHook& hook = nullptr);

// Distributed SGLD: chains are split contiguously, ceil(N/K) per agent; the
// round-robin scheduled agent advances its own chains trajectory_len steps
// per round against p_0^(1/K) * exp(-L_k / alpha). The annealing index is
// the global step count round * trajectory_len + step.
Matrix dsgld_run(const std::vector<LocalModelPtr>& models, const SgldOptions& opts, int rounds,
                 int trajectory_len, int hook_every_rounds = 0,
                 const std::function<void(int round, const Matrix&)>& hook = nullptr);

// Plain SGD descent on the local MAP objective L_k / alpha - log p_0,
// i.e. ascent along the local posterior score, with a fixed rate.
Vector sgd_run(LocalModel& model, Vector theta, long steps, double rate, double alpha,
               Rng& batch_rng);

// FedAvg-style baseline: a single global point; the scheduled agent runs
// local_steps SGD steps and the server adopts the result.
Vector fedavg_run(const std::vector<LocalModelPtr>& models, int rounds, int local_steps,
                  double rate, double alpha, std::uint64_t seed,
                  const std::function<void(int round, const Vector&)>& hook = nullptr);

}  // namespace dsvgd
