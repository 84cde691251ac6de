#pragma once

#include "dsvgd/common.hpp"
#include "dsvgd/svgd.hpp"

#include <memory>
#include <optional>

namespace dsvgd {

// One agent's slice of the inference problem: the shared prior p_0 plus a
// local loss L_k. The generalized local posterior is
//   p~_k(theta) = p_0(theta) * exp(-L_k(theta) / alpha),
// so its score is prior_score - loss_grad / alpha.
class LocalModel {
 public:
  virtual ~LocalModel() = default;

  virtual Index dim() const = 0;

  virtual double prior_log_density(const Vector& theta) const = 0;
  virtual Vector prior_score(const Vector& theta) const = 0;
  virtual Matrix sample_prior(Index n, Rng& rng) const = 0;

  // Minibatch estimate of grad L_k at each row of `points`, rescaled by
  // |D_k| / |batch| so it is unbiased for the full-data gradient. Models
  // without data evaluate exactly and ignore the stream.
  virtual Matrix loss_grad_rows(const Matrix& points, Rng& rng) = 0;

  // Exact full-data loss L_k(theta), used by oracles and exact targets.
  virtual double loss_value(const Vector& theta) const = 0;

  // Exact full-data loss gradient (no minibatching).
  virtual Vector loss_grad_exact(const Vector& theta) const = 0;

  // Hard support of a uniform prior, if any; transport clamps onto it.
  virtual std::optional<SupportBox> support() const { return std::nullopt; }

  Matrix prior_score_rows(const Matrix& points) const {
    Matrix out(points.rows(), points.cols());
    for (Index i = 0; i < points.rows(); ++i) {
      out.row(i) = prior_score(points.row(i).transpose()).transpose();
    }
    return out;
  }
};

using LocalModelPtr = std::shared_ptr<LocalModel>;

}  // namespace dsvgd
