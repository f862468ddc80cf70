#include <doctest.h>

#include "rstkit/eval.hpp"
#include "rstkit/report.hpp"
#include "rstkit/treebank_io.hpp"
#include "support.hpp"

using namespace rstkit;

namespace {

DocumentRecord doc_with(std::string id, std::string genre, std::size_t tokens, std::vector<EduSpan> edus,
                        const std::string& tree) {
  DocumentRecord d;
  d.id = std::move(id);
  d.genre = std::move(genre);
  d.tokens = make_tokens(std::vector<std::string>(tokens, "w"));
  d.edus = std::move(edus);
  d.tree = parse_tree(tree, d.edus);
  return d;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("identical trees score 100 everywhere") {
  const auto t = build_tree(node(node(leaf(0), leaf(1), "joint", Nuclearity::NN), leaf(2), "elaboration", Nuclearity::NS));
  const auto s = parseval(t, t);
  for (Metric m : kAllMetrics) CHECK(s[m].f1() == 100.0);
}

TEST_CASE("one wrong relation on the satellite") {
  // gold ((0 1)joint 2)elab_NS; pred has the outer relation changed.
  const auto gold = build_tree(node(node(leaf(0), leaf(1), "joint", Nuclearity::NN), leaf(2), "elaboration", Nuclearity::NS));
  const auto pred = build_tree(node(node(leaf(0), leaf(1), "joint", Nuclearity::NN), leaf(2), "background", Nuclearity::NS));
  const auto s = parseval(gold, pred);
  CHECK(s[Metric::S].f1() == 100.0);
  CHECK(s[Metric::N].f1() == 100.0);
  CHECK(s[Metric::R].f1() == 75.0);
  CHECK(s[Metric::Full].f1() == 75.0);
}

TEST_CASE("different split at the root over three leaves") {
  // gold ((0 1) 2) constituents {0-1, 0, 1, 2}; pred (0 (1 2)) {0, 1-2, 1, 2}: 3 of 4 spans agree.
  const auto gold = build_tree(node(node(leaf(0), leaf(1), "joint", Nuclearity::NN), leaf(2), "joint", Nuclearity::NN));
  const auto pred = build_tree(node(leaf(0), node(leaf(1), leaf(2), "joint", Nuclearity::NN), "joint", Nuclearity::NN));
  const auto s = parseval(gold, pred);
  CHECK(s[Metric::S].matched == 3);
  CHECK(s[Metric::S].f1() == 75.0);
  // Counting internal nodes including the root instead gives 1 of 2.
  const auto with_root_internal = [](const RstTree& t) {
    std::vector<Constituent> out;
    for (const auto& n : t.nodes())
      if (!n.is_leaf()) out.push_back({n.span, Role::Nucleus, "x"});
    return out;
  };
  CHECK(parseval(with_root_internal(gold), with_root_internal(pred))[Metric::S].f1() == 50.0);
}

TEST_CASE("range mismatch") {
  const std::vector<EduSpan> a{{0, 1}, {2, 3}}, b{{0, 1}, {2, 4}};
  const auto t = build_tree(node(leaf(0), leaf(1), "joint", Nuclearity::NN), a);
  const auto u = build_tree(node(leaf(0), leaf(1), "joint", Nuclearity::NN), b);
  try {
    parseval(t, u);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpanRangeMismatch);
  }
}

TEST_CASE("property: sorted matcher equals the all-pairs matcher") {
  testing::Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    const auto gold_edus = testing::random_edus(n, rng, 3);
    const std::size_t tokens = gold_edus.back().last + 1;
    // predicted segmentation over the same tokens
    std::vector<EduSpan> pred_edus;
    for (std::size_t t = 0; t < tokens; ++t)
      if (t == 0 || rng() % 3 == 0) pred_edus.push_back({t, t});
      else pred_edus.back().last = t;
    const RstTree g(testing::random_spec(0, gold_edus.size(), rng), gold_edus);
    const RstTree p(testing::random_spec(0, pred_edus.size(), rng), pred_edus);
    const auto gc = enumerate_constituents(g);
    const auto pc = enumerate_constituents(p);
    const auto fast = parseval(gc, pc);
    CHECK(fast == parseval_all_pairs(gc, pc));
    for (Metric m : {Metric::S, Metric::N, Metric::R}) CHECK(fast[Metric::Full].matched <= fast[m].matched);
    for (Metric m : kAllMetrics) CHECK(fast[m].matched <= std::min(fast[m].gold, fast[m].pred));
  }
}

TEST_CASE("counts and vacuous cases") {
  CHECK(Counts{0, 0, 0}.f1() == 100.0);
  CHECK(Counts{0, 3, 0}.f1() == 0.0);
  CHECK(Counts{0, 0, 2}.precision() == 0.0);
  const Counts c{2, 4, 3};
  CHECK(c.precision() == doctest::Approx(200.0 / 3));
  CHECK(c.recall() == 50.0);
  CHECK(c.f1() == doctest::Approx(2 * (200.0 / 3) * 50.0 / (200.0 / 3 + 50.0)));
}

TEST_CASE("segmentation F1") {
  const std::vector<EduSpan> gold{{0, 2}, {3, 6}, {7, 9}};
  const std::vector<EduSpan> pred{{0, 2}, {3, 4}, {5, 9}};
  const auto s = segmentation_f1(gold, pred, 10);
  CHECK(s.boundaries.precision() == 50.0);
  CHECK(s.boundaries.recall() == 50.0);
  CHECK(s.boundaries.f1() == 50.0);
  CHECK(segmentation_f1(gold, gold, 10).boundaries.f1() == 100.0);
  const std::vector<EduSpan> one{{0, 9}};
  CHECK(segmentation_f1(gold, one, 10).boundaries.recall() == 0.0);
  CHECK(segmentation_f1(gold, one, 10).boundaries.f1() == 0.0);
  CHECK_THROWS_AS(segmentation_f1(gold, one, 11), Error);
}

TEST_CASE("end to end: a merged EDU pair lowers S") {
  const auto gold = doc_with("d", "g", 6, {{0, 1}, {2, 3}, {4, 5}}, "(elaboration_NS #0 (joint_NN #1 #2))");
  const std::vector<EduSpan> merged{{0, 1}, {2, 5}};
  const auto pred_tree = parse_tree("(elaboration_NS #0 #1)", merged);
  const auto e2e = end_to_end_eval(gold, merged, pred_tree);
  const auto on_gold = end_to_end_eval(gold, gold.edus, *gold.tree);
  CHECK(e2e.parseval[Metric::S].f1() < on_gold.parseval[Metric::S].f1());
  // gold {0-1 N span, 2-5 S elab, 2-3, 4-5}; pred {0-1, 2-5}: 2 matched of 4 gold, 2 pred.
  CHECK(e2e.parseval[Metric::S] == Counts{2, 4, 2});
  CHECK(e2e.segmentation.boundaries == Counts{1, 2, 1});
}

TEST_CASE("evaluate pairs documents by id and groups by genre") {
  Corpus gold, pred;
  gold.documents = {doc_with("a", "news", 4, {{0, 1}, {2, 3}}, "(joint_NN #0 #1)"),
                    doc_with("b", "bio", 3, {{0, 0}, {1, 1}, {2, 2}}, "(joint_NN #0 (joint_NN #1 #2))")};
  pred.documents = {doc_with("b", "bio", 3, {{0, 0}, {1, 1}, {2, 2}}, "(joint_NN (joint_NN #0 #1) #2)"),
                    doc_with("a", "news", 4, {{0, 1}, {2, 3}}, "(joint_NN #0 #1)")};
  const auto r = evaluate(gold, pred, false);
  CHECK(r.documents == 2);
  CHECK(r.total[Metric::S] == Counts{2 + 3, 2 + 4, 2 + 4});
  CHECK(r.by_genre.at("news")[Metric::Full].f1() == 100.0);
  pred.documents.pop_back();
  CHECK_THROWS_AS(evaluate(gold, pred, false), Error);
}

TEST_CASE("sentence files") {
  const auto t = parse_sentence_file("# comment\nd1 0 4 9\nd2 0\n");
  CHECK(t.at("d1") == std::vector<std::size_t>{0, 4, 9});
  CHECK_THROWS_AS(parse_sentence_file("d 0 3 3\n"), Error);
  CHECK_THROWS_AS(parse_sentence_file("d 1 3\n"), Error);
  CHECK_THROWS_AS(parse_sentence_file("d 0 x\n"), Error);
  CHECK_THROWS_AS(parse_sentence_file("d 0\nd 0\n"), Error);
}

TEST_CASE("spanned sentences") {
  // EDUs [0,1] [2,3] [4,5] [6,7]; tree ((0 1) (2 3)).
  const std::vector<EduSpan> edus{{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  const auto tree = parse_tree("(joint_NN (joint_NN #0 #1) (joint_NN #2 #3))", edus);
  SUBCASE("single sentence equal to the root") {
    const std::vector<std::size_t> starts{0};
    const auto c = spanned_sentences(tree, edus, starts, 8);
    CHECK(c.non_elementary_percent() == 100.0);
  }
  SUBCASE("mixed") {
    // [0,3] spanned, [4,4] elementary, [5,7] crosses EDUs but matches no node
    const std::vector<std::size_t> starts{0, 4, 5};
    const auto c = spanned_sentences(tree, edus, starts, 8);
    CHECK(c.sentences == 3);
    CHECK(c.elementary == 1);
    CHECK(c.spanned == 1);
    CHECK(c.non_elementary_percent() == 50.0);
    CHECK(c.overall_percent() == doctest::Approx(200.0 / 3));
  }
}

TEST_CASE("corpus statistics") {
  Corpus c;
  c.documents = {doc_with("a", "news", 4, {{0, 1}, {2, 3}}, "(elaboration_NS #0 #1)"),
                 doc_with("b", "news", 3, {{0, 0}, {1, 1}, {2, 2}}, "(joint_NN #0 (elaboration_NS #1 #2))"),
                 doc_with("c", "bio", 10, {{0, 9}}, "#0")};
  CHECK_THROWS_AS(corpus_stats(c, true), Error);
  const auto s = corpus_stats(c, false);
  CHECK(s.docs == 3);
  CHECK(s.genres == 2);
  CHECK(s.classes == 2);
  CHECK(s.tokens_min == 3);
  CHECK(s.tokens_max == 10);
  CHECK(s.tokens_median == 4.0);
  CHECK(s.edus == 6);
  CHECK(s.edus_per_tree == 2.0);
  CHECK(s.relation_pairs == 3);
  CHECK(s.labelled_constituents == 4);  // elab sat, 2 joint nuclei, elab sat
  const auto by = genre_breakdown(c, false);
  CHECK(by.at("news").docs == 2);
  CHECK(by.at("bio").relation_pairs == 0);
}

TEST_CASE("one genre breaks down to the aggregate") {
  Corpus c;
  c.documents = {doc_with("a", "news", 4, {{0, 1}, {2, 3}}, "(elaboration_NS #0 #1)")};
  c.documents[0].sentence_starts = std::vector<std::size_t>{0};
  const auto all = corpus_stats(c, true);
  const auto by = genre_breakdown(c, true);
  REQUIRE(by.size() == 1);
  CHECK(by.at("news").spanned->spanned == all.spanned->spanned);
  CHECK(by.at("news").edus == all.edus);
}

TEST_CASE("report tables") {
  Table t({"name", "value"});
  t.add_row({"a", "1.0"});
  t.add_row({"long,name", "22.5"});
  CHECK(t.text() == "name       value\na            1.0\nlong,name   22.5\n");
  CHECK(t.csv() == "name,value\na,1.0\n\"long,name\",22.5\n");
  CHECK_THROWS_AS(t.add_row({"x"}), Error);
  CHECK(percent(72.45) == "72.5");
  CHECK(percent(100.0) == "100.0");
}

}  // TEST_SUITE
