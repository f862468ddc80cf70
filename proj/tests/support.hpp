#pragma once
// Generators and brute-force reference implementations shared by the unit
// tests and the acceptance runner. Nothing here calls the code under test
// for the quantity it checks.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rstkit/core.hpp"
#include "rstkit/crf.hpp"
#include "rstkit/decoder.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline const std::vector<std::string>& relation_pool() {
  static const std::vector<std::string> pool{"elaboration", "joint", "attribution", "contrast", "background", "cause"};
  return pool;
}

inline rstkit::RelationLabel random_label(Rng& rng) {
  const auto& pool = relation_pool();
  std::uniform_int_distribution<std::size_t> rel(0, pool.size() - 1);
  std::uniform_int_distribution<int> nuc(0, 2);
  return {pool[rel(rng)], static_cast<rstkit::Nuclearity>(nuc(rng))};
}

// Uniform over split points at every level (not over shapes).
inline rstkit::TreeSpec random_spec(std::size_t begin, std::size_t end, Rng& rng) {
  if (end - begin == 1) return rstkit::TreeSpec::make_leaf(begin);
  std::uniform_int_distribution<std::size_t> split(begin + 1, end - 1);
  const std::size_t m = split(rng);
  auto left = random_spec(begin, m, rng);
  auto right = random_spec(m, end, rng);
  return rstkit::TreeSpec::make_node(std::move(left), std::move(right), random_label(rng));
}

// n EDUs of 1..max_width tokens each.
inline std::vector<rstkit::EduSpan> random_edus(std::size_t n, Rng& rng, std::size_t max_width = 6) {
  std::uniform_int_distribution<std::size_t> width(1, max_width);
  std::vector<rstkit::EduSpan> edus;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = width(rng);
    edus.push_back({pos, pos + w - 1});
    pos += w;
  }
  return edus;
}

inline rstkit::RstTree random_tree(std::size_t n, Rng& rng, const std::vector<rstkit::EduSpan>& edus) {
  return rstkit::RstTree(random_spec(0, n, rng), edus);
}

// Every binary bracketing of [begin, end), labels left empty.
inline std::vector<rstkit::TreeSpec> all_shapes(std::size_t begin, std::size_t end) {
  if (end - begin == 1) return {rstkit::TreeSpec::make_leaf(begin)};
  std::vector<rstkit::TreeSpec> out;
  for (std::size_t m = begin + 1; m < end; ++m)
    for (const auto& l : all_shapes(begin, m))
      for (const auto& r : all_shapes(m, end)) out.push_back(rstkit::TreeSpec::make_node(l, r, {}));
  return out;
}

inline std::size_t catalan(std::size_t n) {
  std::size_t c = 1;
  for (std::size_t k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

// Constituents written out directly from the nested description, without the
// flat node array: every non-root child with its role and relation.
inline void spec_constituents(const rstkit::TreeSpec& s, const std::vector<rstkit::EduSpan>& edus,
                              std::vector<rstkit::Constituent>& out, std::size_t& first, std::size_t& last) {
  if (s.leaf) {
    first = edus[*s.leaf].first;
    last = edus[*s.leaf].last;
    return;
  }
  std::size_t lf, ll, rf, rl;
  spec_constituents(s.children[0], edus, out, lf, ll);
  spec_constituents(s.children[1], edus, out, rf, rl);
  const auto nuc = s.label.nuclearity;
  const std::string rel = s.label.relation;
  const bool left_nucleus = nuc != rstkit::Nuclearity::SN;
  const bool right_nucleus = nuc != rstkit::Nuclearity::NS;
  const auto role = [](bool n) { return n ? rstkit::Role::Nucleus : rstkit::Role::Satellite; };
  const auto relation = [&](bool n) { return nuc == rstkit::Nuclearity::NN ? rel : (n ? std::string("span") : rel); };
  out.push_back({{lf, ll}, role(left_nucleus), relation(left_nucleus)});
  out.push_back({{rf, rl}, role(right_nucleus), relation(right_nucleus)});
  first = lf;
  last = rl;
}

inline std::vector<rstkit::Constituent> reference_constituents(const rstkit::TreeSpec& s,
                                                               const std::vector<rstkit::EduSpan>& edus) {
  std::vector<rstkit::Constituent> out;
  std::size_t f, l;
  spec_constituents(s, edus, out, f, l);
  return out;
}

// Provider backed by random tables, filled lazily and deterministically.
class RandomProvider final : public rstkit::ScoreProvider {
 public:
  RandomProvider(std::size_t n, std::size_t labels, std::uint64_t seed, bool integer_scores = false) : labels_(labels) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> small(-2, 2);
    const auto draw = [&] { return integer_scores ? static_cast<double>(small(rng)) : normal(rng); };
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t e = b + 2; e <= n; ++e) {
        Eigen::VectorXd s(static_cast<Eigen::Index>(e - b - 1));
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = draw();
        splits_[{b, e}] = s;
        for (std::size_t m = b + 1; m < e; ++m) {
          Eigen::VectorXd l(static_cast<Eigen::Index>(labels));
          for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = draw();
          label_[{b, m, e}] = l;
        }
      }
  }

  Eigen::VectorXd split_scores(rstkit::EduRange r) const override { return splits_.at({r.begin, r.end}); }
  Eigen::VectorXd label_scores(rstkit::EduRange l, rstkit::EduRange r) const override {
    return label_.at({l.begin, l.end, r.end});
  }

 private:
  std::size_t labels_;
  std::map<std::pair<std::size_t, std::size_t>, Eigen::VectorXd> splits_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Eigen::VectorXd> label_;
};

// Score of a labelled shape summed straight from the provider tables.
inline double spec_score(const rstkit::TreeSpec& s, const rstkit::ScoreProvider& p,
                         const rstkit::LabelInventory& labels, std::size_t& begin, std::size_t& end) {
  if (s.leaf) {
    begin = *s.leaf;
    end = *s.leaf + 1;
    return 0.0;
  }
  std::size_t lb, le, rb, re;
  double total = spec_score(s.children[0], p, labels, lb, le) + spec_score(s.children[1], p, labels, rb, re);
  total += p.split_scores({lb, re})(static_cast<Eigen::Index>(le - lb - 1));
  total += p.label_scores({lb, le}, {rb, re})(static_cast<Eigen::Index>(*labels.index_of(s.label)));
  begin = lb;
  end = re;
  return total;
}

// Maximum over every shape and every labelling (labels enumerated outright).
struct ExhaustiveBest {
  double score = -INFINITY;
  std::size_t count = 0;  // labelled trees examined
};

inline void label_all(rstkit::TreeSpec& s, std::vector<rstkit::TreeSpec*>& internal) {
  if (s.leaf) return;
  internal.push_back(&s);
  label_all(s.children[0], internal);
  label_all(s.children[1], internal);
}

inline ExhaustiveBest exhaustive_best(std::size_t n, const rstkit::ScoreProvider& p, const rstkit::LabelInventory& labels) {
  ExhaustiveBest best;
  for (auto shape : all_shapes(0, n)) {
    std::vector<rstkit::TreeSpec*> internal;
    label_all(shape, internal);
    std::vector<std::size_t> choice(internal.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < internal.size(); ++k) internal[k]->label = labels.label(choice[k]);
      std::size_t b, e;
      best.score = std::max(best.score, spec_score(shape, p, labels, b, e));
      ++best.count;
      std::size_t k = 0;
      while (k < choice.size() && ++choice[k] == labels.size()) choice[k++] = 0;
      if (k == choice.size()) break;
    }
  }
  return best;
}

// log sum over all L^T label paths, in long double.
template <typename Scalar>
long double enumerate_log_partition(const rstkit::crf::CrfModel<Scalar>& model, const Eigen::MatrixXd& features) {
  const auto scores = (features * model.emission.transpose().template cast<double>()).eval();
  const long T = scores.rows();
  const long L = model.num_labels();
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  std::vector<long double> totals;
  while (true) {
    long double s = model.start(path[0]) + static_cast<long double>(scores(0, path[0]));
    for (long t = 1; t < T; ++t) s += static_cast<long double>(model.transition(path[t - 1], path[t])) + scores(t, path[t]);
    s += model.stop(path[T - 1]);
    totals.push_back(s);
    long t = 0;
    while (t < T && ++path[t] == L) path[t++] = 0;
    if (t == T) break;
  }
  long double m = *std::max_element(totals.begin(), totals.end());
  long double acc = 0;
  for (auto v : totals) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace testing
