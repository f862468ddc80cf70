#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rstkit/error.hpp"

namespace rstkit::dwa {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct DwaConfig {
  Eigen::Index tasks = 3;
  std::size_t window = 12;
  double temperature = 2.0;

  void validate() const {
    if (tasks < 2) throw Error(ErrorKind::InvalidArgument, "DWA needs at least two tasks");
    if (window < 1) throw Error(ErrorKind::InvalidArgument, "DWA window must be at least 1");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
      throw Error(ErrorKind::InvalidArgument, "DWA temperature must be positive");
  }
};

// Dynamic weight average over a window of b steps. Each update() call is one
// optimizer step: the weights for step i come from the 2b losses observed
// before it, then the step's own losses join the history.
template <typename Scalar = double>
class DwaScheduler {
 public:
  explicit DwaScheduler(DwaConfig config = {}) : config_(config) {
    config_.validate();
    weights_ = Vector<Scalar>::Ones(config_.tasks);
    rates_ = Vector<Scalar>::Ones(config_.tasks);
  }

  const DwaConfig& config() const { return config_; }
  std::size_t steps() const { return steps_; }
  bool warmed_up() const { return history_.size() == 2 * config_.window; }

  // Weights returned by the latest update (uniform before the first).
  const Vector<Scalar>& weights() const { return weights_; }
  // Descent rates w_k behind the latest weights; ones during warm-up.
  const Vector<Scalar>& rates() const { return rates_; }

  template <typename Derived>
  const Vector<Scalar>& update(const Eigen::MatrixBase<Derived>& losses) {
    const Vector<Scalar> l = losses.template cast<Scalar>();
    check(l);
    if (warmed_up()) {
      const std::size_t b = config_.window;
      // history_.back() is L(i-1); history_[2b - j] is L(i-j).
      Vector<Scalar> recent = Vector<Scalar>::Zero(config_.tasks);
      Vector<Scalar> older = Vector<Scalar>::Zero(config_.tasks);
      for (std::size_t j = 1; j <= b; ++j) recent += history_[2 * b - j];
      for (std::size_t j = b + 1; j <= 2 * b; ++j) older += history_[2 * b - j];
      rates_ = recent.cwiseQuotient(older);
      const Vector<Scalar> z = rates_ / static_cast<Scalar>(config_.temperature);
      const Vector<Scalar> e = (z.array() - z.maxCoeff()).exp().matrix();
      const Scalar total = e.sum();
      const Scalar k = static_cast<Scalar>(config_.tasks);
      for (Eigen::Index t = 0; t < config_.tasks; ++t) weights_(t) = (k * e(t)) / total;
    } else {
      weights_.setOnes();
      rates_.setOnes();
    }
    history_.push_back(l);
    if (history_.size() > 2 * config_.window) history_.pop_front();
    ++steps_;
    return weights_;
  }

  const Vector<Scalar>& update(std::initializer_list<Scalar> losses) {
    Vector<Scalar> v(static_cast<Eigen::Index>(losses.size()));
    Eigen::Index i = 0;
    for (Scalar x : losses) v(i++) = x;
    return update(v);
  }

 private:
  void check(const Vector<Scalar>& l) const {
    if (l.size() != config_.tasks)
      throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(config_.tasks) + " task losses, got " +
                                                    std::to_string(l.size()));
    for (Eigen::Index t = 0; t < l.size(); ++t) {
      if (!std::isfinite(static_cast<double>(l(t))))
        throw Error(ErrorKind::NaNLoss, "loss of task " + std::to_string(t) + " is not finite");
      if (!(l(t) > Scalar(0)))
        throw Error(ErrorKind::NonPositiveLoss, "loss of task " + std::to_string(t) + " is not positive");
    }
  }

  DwaConfig config_;
  std::deque<Vector<Scalar>> history_;
  Vector<Scalar> weights_;
  Vector<Scalar> rates_;
  std::size_t steps_ = 0;
};

template <typename A, typename B>
typename A::Scalar total_loss(const Eigen::MatrixBase<A>& losses, const Eigen::MatrixBase<B>& weights) {
  if (losses.size() != weights.size())
    throw Error(ErrorKind::DimensionMismatch, "losses and weights differ in length");
  return losses.cwiseProduct(weights.template cast<typename A::Scalar>()).sum();
}

// Replays a loss log (one row per step) and returns the weight after each step.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> replay(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& log, DwaConfig config) {
  config.tasks = log.cols();
  DwaScheduler<Scalar> s(config);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(log.rows(), log.cols());
  for (Eigen::Index i = 0; i < log.rows(); ++i) out.row(i) = s.update(log.row(i).transpose()).transpose();
  return out;
}

}  // namespace rstkit::dwa
