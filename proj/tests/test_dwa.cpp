#include <doctest.h>

#include <cmath>
#include <random>

#include "rstkit/dwa.hpp"

using namespace rstkit;
using dwa::DwaConfig;
using dwa::DwaScheduler;

namespace {

double variance(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("dwa") {

TEST_CASE("warm-up weights are uniform") {
  DwaScheduler<double> s({3, 2, 2.0});
  for (int i = 0; i < 4; ++i) {
    CHECK(s.update({1.0 + i, 2.0, 3.0 * (i + 1)}) == Eigen::Vector3d::Ones());
  }
  CHECK(s.warmed_up());
}

TEST_CASE("hand-evaluated softmax for b = 1, Temp = 1") {
  DwaScheduler<double> s({3, 1, 1.0});
  s.update({8.0, 2.0, 1.0});  // L(i-2)
  s.update({4.0, 2.0, 1.0});  // L(i-1)
  const auto& w = s.update({1.0, 1.0, 1.0});
  const long double e05 = std::exp(0.5L), e1 = std::exp(1.0L);
  const long double l1 = 3 * e05 / (e05 + 2 * e1);
  const long double l2 = 3 * e1 / (e05 + 2 * e1);
  CHECK(std::abs(w(0) - l1) < 1e-14L);
  CHECK(std::abs(w(1) - l2) < 1e-14L);
  CHECK(std::abs(w(2) - l2) < 1e-14L);
  CHECK(s.rates() == Eigen::Vector3d(0.5, 1.0, 1.0));
}

TEST_CASE("constant losses give exactly one after warm-up") {
  for (std::size_t b : {1, 3, 12})
    for (double temp : {0.5, 2.0, 10.0}) {
      DwaScheduler<double> s({4, b, temp});
      for (int i = 0; i < 40; ++i) {
        const auto& w = s.update(Eigen::Vector4d::Constant(0.37));
        CHECK(w == Eigen::Vector4d::Ones());
      }
    }
}

TEST_CASE("property: weights sum to K and are positive") {
  std::mt19937_64 rng(17);
  std::lognormal_distribution<double> loss(0.0, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng() % 4);
    const std::size_t b = 1 + rng() % 5;
    DwaScheduler<double> s({k, b, 0.1 + static_cast<double>(rng() % 40) / 10.0});
    for (int i = 0; i < 30; ++i) {
      Eigen::VectorXd l(k);
      for (Eigen::Index t = 0; t < k; ++t) l(t) = loss(rng);
      const auto& w = s.update(l);
      CHECK(std::abs(w.sum() - static_cast<double>(k)) < 1e-12);
      CHECK((w.array() > 0).all());
    }
  }
}

TEST_CASE("large temperature approaches uniform") {
  DwaScheduler<double> s({3, 1, 1e6});
  s.update({10.0, 1.0, 0.1});
  s.update({1.0, 5.0, 0.2});
  const auto& w = s.update({1.0, 1.0, 1.0});
  CHECK((w.array() - 1.0).abs().maxCoeff() < 1e-5);
}

TEST_CASE("per-task scaling of the history leaves weights unchanged") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  const Eigen::Vector3d scale(3.0, 0.01, 250.0);
  DwaScheduler<double> a({3, 4, 2.0}), b({3, 4, 2.0});
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d l(u(rng), u(rng), u(rng));
    const Eigen::Vector3d wa = a.update(l);
    const Eigen::Vector3d wb = b.update(l.cwiseProduct(scale));
    CHECK((wa - wb).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("window reduces weight variance on a noisy stream") {
  std::mt19937_64 rng(2024);
  std::lognormal_distribution<double> noise(0.0, 0.3);
  std::vector<Eigen::Vector3d> stream;
  for (int i = 0; i < 600; ++i) {
    const double decay = std::exp(-0.002 * i);
    stream.emplace_back(2.0 * decay * noise(rng), 1.0 * decay * noise(rng), 0.5 * decay * noise(rng));
  }
  std::vector<double> w1, w12;
  DwaScheduler<double> s1({3, 1, 2.0}), s12({3, 12, 2.0});
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const double a = s1.update(stream[i])(0);
    const double b = s12.update(stream[i])(0);
    if (i >= 24) {
      w1.push_back(a);
      w12.push_back(b);
    }
  }
  CHECK(variance(w12) < variance(w1));
}

TEST_CASE("invalid input") {
  DwaScheduler<double> s({3, 1, 2.0});
  const auto kind = [&](Eigen::Vector3d l) {
    try {
      s.update(l);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind({1.0, 0.0, 1.0}) == ErrorKind::NonPositiveLoss);
  CHECK(kind({1.0, -2.0, 1.0}) == ErrorKind::NonPositiveLoss);
  CHECK(kind({1.0, NAN, 1.0}) == ErrorKind::NaNLoss);
  CHECK(kind({INFINITY, 1.0, 1.0}) == ErrorKind::NaNLoss);
  CHECK(s.steps() == 0);
  CHECK_THROWS_AS(s.update(Eigen::Vector2d(1.0, 1.0)), Error);
  CHECK_THROWS_AS(DwaScheduler<double>({1, 1, 1.0}), Error);
  CHECK_THROWS_AS(DwaScheduler<double>({3, 0, 1.0}), Error);
  CHECK_THROWS_AS(DwaScheduler<double>({3, 1, 0.0}), Error);
}

TEST_CASE("total loss") {
  CHECK(dwa::total_loss(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 1, 1)) == 6.0);
  CHECK(dwa::total_loss(Eigen::Vector3d(5, 5, 2), Eigen::Vector3d(0, 0, 3)) == 6.0);
  CHECK_THROWS_AS(dwa::total_loss(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2)), Error);
}

TEST_CASE("defaults and float instantiation") {
  const DwaConfig c;
  CHECK(c.tasks == 3);
  CHECK(c.window == 12);
  CHECK(c.temperature == 2.0);
  DwaScheduler<float> s({2, 1, 1.0});
  s.update(Eigen::Vector2f(2.0f, 1.0f));
  s.update(Eigen::Vector2f(1.0f, 1.0f));
  CHECK(std::abs(s.update(Eigen::Vector2f(1.0f, 1.0f)).sum() - 2.0f) < 1e-6f);
}

}  // TEST_SUITE
