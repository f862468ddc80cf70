#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rstkit/error.hpp"

namespace rstkit::crf {

using Index = Eigen::Index;
using LabelSequence = std::vector<int>;

// Linear-chain CRF. Emission weights map features to per-label scores;
// transition(a, b) scores label a followed by label b.
template <typename Scalar>
struct CrfModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix emission;    // labels x features
  Matrix transition;  // labels x labels
  Vector start;
  Vector stop;
  std::vector<std::string> labels;

  CrfModel() = default;
  CrfModel(Index num_labels, Index feature_dim)
      : emission(Matrix::Zero(num_labels, feature_dim)),
        transition(Matrix::Zero(num_labels, num_labels)),
        start(Vector::Zero(num_labels)),
        stop(Vector::Zero(num_labels)) {
    if (num_labels == 2) {
      labels = {"B", "I"};
    } else {
      for (Index i = 0; i < num_labels; ++i) labels.push_back("L" + std::to_string(i));
    }
  }

  Index num_labels() const { return transition.rows(); }
  Index feature_dim() const { return emission.cols(); }

  void validate() const {
    const Index L = num_labels();
    if (L < 2) throw Error(ErrorKind::DimensionMismatch, "CRF needs at least two labels");
    if (transition.cols() != L || emission.rows() != L || start.size() != L || stop.size() != L ||
        static_cast<Index>(labels.size()) != L)
      throw Error(ErrorKind::DimensionMismatch, "CRF parameter shapes are inconsistent");
    if (!emission.allFinite() || !transition.allFinite() || !start.allFinite() || !stop.allFinite())
      throw Error(ErrorKind::DimensionMismatch, "CRF parameters must be finite");
  }

  template <typename Other>
  CrfModel<Other> cast() const {
    CrfModel<Other> out;
    out.emission = emission.template cast<Other>();
    out.transition = transition.template cast<Other>();
    out.start = start.template cast<Other>();
    out.stop = stop.template cast<Other>();
    out.labels = labels;
    return out;
  }
};

// Same layout as the model; used for gradients and optimizer moments.
template <typename Scalar>
struct CrfGradient {
  typename CrfModel<Scalar>::Matrix emission;
  typename CrfModel<Scalar>::Matrix transition;
  typename CrfModel<Scalar>::Vector start;
  typename CrfModel<Scalar>::Vector stop;

  static CrfGradient zeros_like(const CrfModel<Scalar>& m) {
    return {CrfModel<Scalar>::Matrix::Zero(m.emission.rows(), m.emission.cols()),
            CrfModel<Scalar>::Matrix::Zero(m.transition.rows(), m.transition.cols()),
            CrfModel<Scalar>::Vector::Zero(m.start.size()), CrfModel<Scalar>::Vector::Zero(m.stop.size())};
  }
};

template <typename Scalar>
using ScoreMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Per-token label scores (seq_len x labels) for dense or sparse features.
template <typename Scalar, typename Features>
ScoreMatrix<Scalar> emission_scores(const CrfModel<Scalar>& model, const Features& features) {
  if (features.cols() != model.feature_dim())
    throw Error(ErrorKind::DimensionMismatch, "feature dimension " + std::to_string(features.cols()) +
                                                  " does not match model dimension " +
                                                  std::to_string(model.feature_dim()));
  if (features.rows() < 1) throw Error(ErrorKind::DimensionMismatch, "empty sequence");
  return features * model.emission.transpose();
}

template <typename Scalar>
Scalar path_score_from_scores(const CrfModel<Scalar>& model, const ScoreMatrix<Scalar>& scores,
                              std::span<const int> path) {
  if (static_cast<Index>(path.size()) != scores.rows())
    throw Error(ErrorKind::DimensionMismatch, "label sequence length differs from sequence length");
  Scalar s = model.start(path[0]) + scores(0, path[0]);
  for (Index t = 1; t < scores.rows(); ++t) s += model.transition(path[t - 1], path[t]) + scores(t, path[t]);
  return s + model.stop(path.back());
}

template <typename Scalar, typename Features>
Scalar path_score(const CrfModel<Scalar>& model, const Features& features, std::span<const int> path) {
  return path_score_from_scores(model, emission_scores(model, features), path);
}

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  using std::exp;
  using std::log;
  const auto m = v.maxCoeff();
  if (!std::isfinite(static_cast<double>(m))) return m;
  return m + log((v.array() - m).exp().sum());
}

// Log-space forward pass; row t holds log alpha_t.
template <typename Scalar>
ScoreMatrix<Scalar> forward_table(const CrfModel<Scalar>& model, const ScoreMatrix<Scalar>& scores) {
  const Index T = scores.rows();
  const Index L = model.num_labels();
  ScoreMatrix<Scalar> alpha(T, L);
  alpha.row(0) = model.start.transpose() + scores.row(0);
  for (Index t = 1; t < T; ++t)
    for (Index y = 0; y < L; ++y)
      alpha(t, y) = log_sum_exp((alpha.row(t - 1).transpose() + model.transition.col(y)).eval()) + scores(t, y);
  return alpha;
}

// Log-space backward pass; row t holds log beta_t (stop scores included).
template <typename Scalar>
ScoreMatrix<Scalar> backward_table(const CrfModel<Scalar>& model, const ScoreMatrix<Scalar>& scores) {
  const Index T = scores.rows();
  const Index L = model.num_labels();
  ScoreMatrix<Scalar> beta(T, L);
  beta.row(T - 1) = model.stop.transpose();
  for (Index t = T - 1; t-- > 0;)
    for (Index y = 0; y < L; ++y)
      beta(t, y) = log_sum_exp((model.transition.row(y).transpose() + scores.row(t + 1).transpose() +
                                beta.row(t + 1).transpose())
                                   .eval());
  return beta;
}

template <typename Scalar>
Scalar log_partition_from_scores(const CrfModel<Scalar>& model, const ScoreMatrix<Scalar>& scores) {
  const auto alpha = forward_table(model, scores);
  return log_sum_exp((alpha.row(scores.rows() - 1).transpose() + model.stop).eval());
}

template <typename Scalar, typename Features>
Scalar log_partition(const CrfModel<Scalar>& model, const Features& features) {
  return log_partition_from_scores(model, emission_scores(model, features));
}

// Highest-scoring label path. Ties go to the lower label index.
template <typename Scalar>
LabelSequence viterbi_from_scores(const CrfModel<Scalar>& model, const ScoreMatrix<Scalar>& scores) {
  const Index T = scores.rows();
  const Index L = model.num_labels();
  ScoreMatrix<Scalar> delta(T, L);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> back(T, L);
  delta.row(0) = model.start.transpose() + scores.row(0);
  for (Index t = 1; t < T; ++t) {
    for (Index y = 0; y < L; ++y) {
      Index best = 0;
      Scalar best_score = delta(t - 1, 0) + model.transition(0, y);
      for (Index p = 1; p < L; ++p) {
        const Scalar s = delta(t - 1, p) + model.transition(p, y);
        if (s > best_score) {
          best_score = s;
          best = p;
        }
      }
      delta(t, y) = best_score + scores(t, y);
      back(t, y) = static_cast<int>(best);
    }
  }
  Index last = 0;
  Scalar last_score = delta(T - 1, 0) + model.stop(0);
  for (Index y = 1; y < L; ++y) {
    const Scalar s = delta(T - 1, y) + model.stop(y);
    if (s > last_score) {
      last_score = s;
      last = y;
    }
  }
  LabelSequence path(static_cast<std::size_t>(T));
  path[T - 1] = static_cast<int>(last);
  for (Index t = T - 1; t > 0; --t) path[t - 1] = back(t, path[t]);
  return path;
}

template <typename Scalar, typename Features>
LabelSequence viterbi(const CrfModel<Scalar>& model, const Features& features) {
  return viterbi_from_scores(model, emission_scores(model, features));
}

template <typename Scalar>
struct Likelihood {
  Scalar log_likelihood;
  CrfGradient<Scalar> gradient;  // d log p(gold) / d parameters
};

// log p(gold | features) and its exact gradient (observed minus expected
// feature counts from forward-backward marginals).
template <typename Scalar, typename Features>
Likelihood<Scalar> log_likelihood(const CrfModel<Scalar>& model, const Features& features,
                                  std::span<const int> gold) {
  using std::exp;
  const auto scores = emission_scores(model, features);
  const Index T = scores.rows();
  const Index L = model.num_labels();
  if (static_cast<Index>(gold.size()) != T)
    throw Error(ErrorKind::DimensionMismatch, "gold labels length " + std::to_string(gold.size()) +
                                                  " differs from sequence length " + std::to_string(T));
  for (int y : gold)
    if (y < 0 || y >= L) throw Error(ErrorKind::DimensionMismatch, "gold label out of range");

  const auto alpha = forward_table(model, scores);
  const auto beta = backward_table(model, scores);
  const Scalar log_z = log_sum_exp((alpha.row(T - 1).transpose() + model.stop).eval());

  Likelihood<Scalar> out{path_score_from_scores(model, scores, gold) - log_z, CrfGradient<Scalar>::zeros_like(model)};
  auto& g = out.gradient;

  // Node marginals minus gold indicators, transposed later against features.
  ScoreMatrix<Scalar> residual = -((alpha + beta).array() - log_z).exp().matrix();
  for (Index t = 0; t < T; ++t) residual(t, gold[t]) += Scalar(1);

  g.start = residual.row(0).transpose();
  g.stop = residual.row(T - 1).transpose();
  for (Index t = 1; t < T; ++t) {
    for (Index a = 0; a < L; ++a)
      for (Index b = 0; b < L; ++b)
        g.transition(a, b) -= exp(alpha(t - 1, a) + model.transition(a, b) + scores(t, b) + beta(t, b) - log_z);
    g.transition(gold[t - 1], gold[t]) += Scalar(1);
  }
  g.emission = residual.transpose() * features;
  return out;
}

template <typename Features>
struct Sequence {
  Features features;
  LabelSequence labels;
};

enum class Optimizer { sgd, adam };

template <typename Scalar>
struct TrainConfig {
  int epochs = 30;
  Scalar learning_rate = Scalar(0.05);
  Scalar l2 = Scalar(0);
  Optimizer optimizer = Optimizer::adam;
  std::uint64_t seed = 20240101;
  bool shuffle = true;
};

template <typename Scalar>
struct TrainResult {
  std::vector<Scalar> loss_curve;  // mean negative log-likelihood per epoch
};

namespace detail {

template <typename Scalar>
struct AdamMoments {
  CrfGradient<Scalar> m;
  CrfGradient<Scalar> v;
  long step = 0;
};

template <typename Param, typename Grad>
void adam_step(Param& p, const Grad& g, Grad& m, Grad& v, double lr, double c1, double c2) {
  using S = typename Param::Scalar;
  constexpr S b1 = S(0.9);
  constexpr S b2 = S(0.999);
  constexpr S eps = S(1e-8);
  m = b1 * m + (S(1) - b1) * g;
  v = b2 * v + (S(1) - b2) * g.cwiseProduct(g);
  p.array() += S(lr) * (m.array() / S(c1)) / ((v.array() / S(c2)).sqrt() + eps);
}

}  // namespace detail

// Per-sequence stochastic optimisation of the conditional log-likelihood
// (ascent on log p, i.e. descent on the loss). Deterministic for a seed.
template <typename Scalar, typename Features>
TrainResult<Scalar> train(CrfModel<Scalar>& model, std::span<const Sequence<Features>> data,
                          const TrainConfig<Scalar>& config) {
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "no training sequences");
  model.validate();
  TrainResult<Scalar> result;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  detail::AdamMoments<Scalar> adam{CrfGradient<Scalar>::zeros_like(model), CrfGradient<Scalar>::zeros_like(model), 0};

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    Scalar total = 0;
    for (auto idx : order) {
      const auto& seq = data[idx];
      auto lik = log_likelihood(model, seq.features, std::span<const int>(seq.labels));
      total -= lik.log_likelihood;
      auto& g = lik.gradient;
      if (config.l2 > 0) {
        g.emission -= config.l2 * model.emission;
        g.transition -= config.l2 * model.transition;
        g.start -= config.l2 * model.start;
        g.stop -= config.l2 * model.stop;
      }
      if (config.optimizer == Optimizer::sgd) {
        model.emission += config.learning_rate * g.emission;
        model.transition += config.learning_rate * g.transition;
        model.start += config.learning_rate * g.start;
        model.stop += config.learning_rate * g.stop;
      } else {
        ++adam.step;
        const double c1 = 1.0 - std::pow(0.9, static_cast<double>(adam.step));
        const double c2 = 1.0 - std::pow(0.999, static_cast<double>(adam.step));
        const double lr = static_cast<double>(config.learning_rate);
        detail::adam_step(model.emission, g.emission, adam.m.emission, adam.v.emission, lr, c1, c2);
        detail::adam_step(model.transition, g.transition, adam.m.transition, adam.v.transition, lr, c1, c2);
        detail::adam_step(model.start, g.start, adam.m.start, adam.v.start, lr, c1, c2);
        detail::adam_step(model.stop, g.stop, adam.m.stop, adam.v.stop, lr, c1, c2);
      }
    }
    result.loss_curve.push_back(total / static_cast<Scalar>(data.size()));
  }
  return result;
}

// Fraction of tokens whose Viterbi label equals the gold label.
template <typename Scalar, typename Features>
double token_accuracy(const CrfModel<Scalar>& model, std::span<const Sequence<Features>> data) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& seq : data) {
    const auto path = viterbi(model, seq.features);
    for (std::size_t t = 0; t < path.size(); ++t) correct += path[t] == seq.labels[t];
    total += path.size();
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

}  // namespace rstkit::crf
