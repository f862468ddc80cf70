#include <doctest.h>

#include <random>

#include "rstkit/crf.hpp"
#include "rstkit/segmenter.hpp"
#include "support.hpp"

using namespace rstkit;
using crf::CrfModel;

namespace {

CrfModel<double> random_model(Eigen::Index L, Eigen::Index D, testing::Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  CrfModel<double> m(L, D);
  for (Eigen::Index i = 0; i < m.emission.size(); ++i) m.emission.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < m.transition.size(); ++i) m.transition.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < L; ++i) {
    m.start(i) = normal(rng);
    m.stop(i) = normal(rng);
  }
  return m;
}

Eigen::MatrixXd random_features(Eigen::Index T, Eigen::Index D, testing::Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(T, D);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

std::vector<int> random_labels(Eigen::Index T, Eigen::Index L, testing::Rng& rng) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(L) - 1);
  std::vector<int> y(static_cast<std::size_t>(T));
  for (auto& v : y) v = pick(rng);
  return y;
}

// Brute-force argmax over all L^T paths.
std::vector<int> enumerate_best_path(const CrfModel<double>& m, const Eigen::MatrixXd& x) {
  const auto T = x.rows();
  const auto L = m.num_labels();
  std::vector<int> path(static_cast<std::size_t>(T), 0), best;
  double best_score = -INFINITY;
  while (true) {
    const double s = crf::path_score(m, x, std::span<const int>(path));
    if (s > best_score) {
      best_score = s;
      best = path;
    }
    Eigen::Index t = 0;
    while (t < T && ++path[t] == L) path[t++] = 0;
    if (t == T) break;
  }
  return best;
}

}  // namespace

TEST_SUITE("crf") {

TEST_CASE("log partition equals path enumeration") {
  testing::Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index T = 1 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index L = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Eigen::Index D = 1 + static_cast<Eigen::Index>(rng() % 4);
    const auto m = random_model(L, D, rng);
    const auto x = random_features(T, D, rng);
    const long double want = testing::enumerate_log_partition(m, x);
    CHECK(std::abs(static_cast<long double>(crf::log_partition(m, x)) - want) < 1e-10L);
  }
}

TEST_CASE("viterbi equals brute-force argmax") {
  testing::Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index T = 1 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index L = 2 + static_cast<Eigen::Index>(rng() % 2);
    const auto m = random_model(L, 3, rng);
    const auto x = random_features(T, 3, rng);
    CHECK(crf::viterbi(m, x) == enumerate_best_path(m, x));
  }
}

TEST_CASE("viterbi prefers the lower label on exact ties") {
  CrfModel<double> m(2, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 1);
  CHECK(crf::viterbi(m, x) == std::vector<int>{0, 0, 0});
}

TEST_CASE("gradient matches central finite differences") {
  testing::Rng rng(303);
  constexpr double h = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index T = 1 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index L = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Eigen::Index D = 1 + static_cast<Eigen::Index>(rng() % 3);
    auto m = random_model(L, D, rng, 0.5);
    const auto x = random_features(T, D, rng);
    const auto y = random_labels(T, L, rng);
    const auto lik = crf::log_likelihood(m, x, std::span<const int>(y));
    const auto f = [&] { return crf::log_likelihood(m, x, std::span<const int>(y)).log_likelihood; };
    const auto check_block = [&](auto& param, const auto& grad) {
      for (Eigen::Index i = 0; i < param.size(); ++i) {
        const double saved = param.data()[i];
        param.data()[i] = saved + h;
        const double up = f();
        param.data()[i] = saved - h;
        const double down = f();
        param.data()[i] = saved;
        const double numeric = (up - down) / (2 * h);
        const double analytic = grad.data()[i];
        const double rel = std::abs(numeric - analytic) / std::max(1.0, std::abs(numeric) + std::abs(analytic));
        CHECK(rel < 1e-4);
      }
    };
    check_block(m.emission, lik.gradient.emission);
    check_block(m.transition, lik.gradient.transition);
    check_block(m.start, lik.gradient.start);
    check_block(m.stop, lik.gradient.stop);
  }
}

TEST_CASE("probabilities of all paths sum to one") {
  testing::Rng rng(404);
  const auto m = random_model(3, 2, rng);
  const auto x = random_features(4, 2, rng);
  std::vector<int> path(4, 0);
  double total = 0;
  while (true) {
    total += std::exp(crf::log_likelihood(m, x, std::span<const int>(path)).log_likelihood);
    std::size_t t = 0;
    while (t < path.size() && ++path[t] == 3) path[t++] = 0;
    if (t == path.size()) break;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sparse and dense features agree") {
  testing::Rng rng(505);
  const auto m = random_model(2, 5, rng);
  const auto x = random_features(4, 5, rng);
  const SparseFeatures sx = x.sparseView();
  CHECK(crf::log_partition(m, sx) == doctest::Approx(crf::log_partition(m, x)).epsilon(1e-14));
}

TEST_CASE("shape errors") {
  CrfModel<double> m(2, 3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 4);
  CHECK_THROWS_AS(crf::log_partition(m, x), Error);
  const Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(2, 3);
  const std::vector<int> y{0};
  CHECK_THROWS_AS(crf::log_likelihood(m, ok, std::span<const int>(y)), Error);
  std::vector<crf::Sequence<Eigen::MatrixXd>> none;
  CHECK_THROWS_AS(crf::train(m, std::span<const crf::Sequence<Eigen::MatrixXd>>(none), crf::TrainConfig<double>{}), Error);
}

TEST_CASE("training is deterministic for a seed and fits separable data") {
  // Label 0 exactly where feature 0 fires.
  testing::Rng rng(606);
  std::vector<crf::Sequence<Eigen::MatrixXd>> data;
  for (int s = 0; s < 20; ++s) {
    const Eigen::Index T = 3 + static_cast<Eigen::Index>(rng() % 8);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(T, 3);
    std::vector<int> y(static_cast<std::size_t>(T));
    for (Eigen::Index t = 0; t < T; ++t) {
      const bool b = t == 0 || rng() % 3 == 0;
      x(t, b ? 0 : 1) = 1.0;
      x(t, 2) = 1.0;
      y[t] = b ? 0 : 1;
    }
    data.push_back({x, y});
  }
  CrfModel<double> a(2, 3), b(2, 3);
  crf::TrainConfig<double> config;
  config.epochs = 40;
  const auto ra = crf::train(a, std::span<const crf::Sequence<Eigen::MatrixXd>>(data), config);
  crf::train(b, std::span<const crf::Sequence<Eigen::MatrixXd>>(data), config);
  CHECK(a.emission == b.emission);
  CHECK(ra.loss_curve.back() < ra.loss_curve.front());
  CHECK(crf::token_accuracy(a, std::span<const crf::Sequence<Eigen::MatrixXd>>(data)) == 1.0);
}

TEST_CASE("long double instantiation") {
  testing::Rng rng(707);
  const auto m = random_model(2, 2, rng).cast<long double>();
  const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> x =
      random_features(3, 2, rng).cast<long double>();
  const auto z = crf::log_partition(m, x);
  CHECK(std::isfinite(static_cast<double>(z)));
}

}  // TEST_SUITE

TEST_SUITE("segmenter") {

TEST_CASE("labels and EDUs convert both ways") {
  const std::vector<int> labels{1, 1, 0, 1, 0};  // token 0 starts an EDU regardless
  const auto edus = labels_to_edus(labels);
  CHECK(edus == std::vector<EduSpan>{{0, 1}, {2, 3}, {4, 4}});
  CHECK(edus_to_labels(edus, 5) == std::vector<int>{0, 1, 0, 1, 0});
  CHECK_THROWS_AS(edus_to_labels(edus, 6), Error);
}

TEST_CASE("hashed features are deterministic and bounded") {
  const auto toks = make_tokens(std::vector<std::string>{"When", "it", "rained", ",", "we", "left", "."});
  const HashedWindowFeatures f(10);
  const auto a = f.extract(toks);
  const auto b = f.extract(toks);
  CHECK(a.rows() == 7);
  CHECK(a.cols() == 1024);
  CHECK(Eigen::MatrixXd(a) == Eigen::MatrixXd(b));
  const auto names = f.feature_names(toks, 4);
  CHECK(std::find(names.begin(), names.end(), "comma-1") != names.end());
  CHECK(std::find(names.begin(), names.end(), "w0=we") != names.end());
  CHECK_THROWS_AS(HashedWindowFeatures(2), Error);
  CHECK(fnv1a("") == 14695981039346656037ULL);
}

TEST_CASE("model text round-trips exactly") {
  Segmenter seg;
  seg.hash_bits = 6;
  seg.model = SegmenterModel(2, 64);
  testing::Rng rng(808);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 20; ++k) seg.model.emission(static_cast<Eigen::Index>(rng() % 2), static_cast<Eigen::Index>(rng() % 64)) = normal(rng);
  seg.model.transition(0, 1) = 1.0 / 3.0;
  seg.model.start(1) = -2.5e-7;
  const auto back = parse_segmenter(serialize_segmenter(seg));
  CHECK(back.model.emission == seg.model.emission);
  CHECK(back.model.transition == seg.model.transition);
  CHECK(back.model.start == seg.model.start);
  CHECK(serialize_segmenter(back) == serialize_segmenter(seg));
  CHECK_THROWS_AS(parse_segmenter("rstkit-crf 2\n"), Error);
}

TEST_CASE("dense callback hook") {
  const DenseCallbackFeatures f(2, [](std::span<const Token> toks) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(toks.size()), 2);
    x.col(0).setOnes();
    return x;
  });
  const auto toks = make_tokens(std::vector<std::string>{"a", "b"});
  CHECK(f.extract(toks).nonZeros() == 2);
}

}  // TEST_SUITE
