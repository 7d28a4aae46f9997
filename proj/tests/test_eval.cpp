#include <doctest.h>

#include <progmod/confidence.hpp>
#include <progmod/errors.hpp>
#include <progmod/eval.hpp>
#include <progmod/rng.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace progmod;
using testutil::d6;
using testutil::replicate_rows;

namespace reference {

// plain recursive ordered forest edit distance, memoized on forest pairs
struct Ted {
  const LabeledTree& ta;
  const LabeledTree& tb;
  std::map<std::string, std::size_t> memo;

  static std::string key_of(const std::vector<std::size_t>& f, const std::vector<std::size_t>& g) {
    std::string k;
    for (auto v : f) k += std::to_string(v) + ",";
    k += "|";
    for (auto v : g) k += std::to_string(v) + ",";
    return k;
  }

  std::size_t size_of(const LabeledTree& t, std::size_t v) const {
    std::size_t s = 1;
    for (std::size_t c : t.nodes[v].children) s += size_of(t, c);
    return s;
  }

  std::size_t forest_size(const LabeledTree& t, const std::vector<std::size_t>& f) const {
    std::size_t s = 0;
    for (std::size_t v : f) s += size_of(t, v);
    return s;
  }

  std::size_t ed(std::vector<std::size_t> f, std::vector<std::size_t> g) {
    if (f.empty()) return forest_size(tb, g);
    if (g.empty()) return forest_size(ta, f);
    const std::string k = key_of(f, g);
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;

    const std::size_t rf = f.back(), rg = g.back();

    std::vector<std::size_t> f_del(f.begin(), f.end() - 1);
    f_del.insert(f_del.end(), ta.nodes[rf].children.begin(), ta.nodes[rf].children.end());
    std::vector<std::size_t> g_ins(g.begin(), g.end() - 1);
    g_ins.insert(g_ins.end(), tb.nodes[rg].children.begin(), tb.nodes[rg].children.end());

    const std::size_t del = ed(f_del, g) + 1;
    const std::size_t ins = ed(f, g_ins) + 1;
    const std::size_t match =
        ed({f.begin(), f.end() - 1}, {g.begin(), g.end() - 1}) +
        ed(ta.nodes[rf].children, tb.nodes[rg].children) +
        (ta.nodes[rf].label == tb.nodes[rg].label ? 0 : 1);

    const std::size_t best = std::min({del, ins, match});
    memo[k] = best;
    return best;
  }
};

std::size_t ted(const LabeledTree& a, const LabeledTree& b) {
  Ted t{a, b, {}};
  return t.ed({a.root}, {b.root});
}

// random rooted tree over n nodes with labels drawn from a tiny alphabet
LabeledTree random_tree(Rng& rng, std::size_t n) {
  LabeledTree t;
  t.nodes.push_back({"<root>", {}});
  for (std::size_t v = 1; v <= n; ++v) {
    t.nodes.push_back({std::string(1, static_cast<char>('x' + rng.below(3))), {}});
    t.nodes[rng.below(v)].children.push_back(v);
  }
  t.root = 0;
  return t;
}

}  // namespace reference

TEST_CASE("graphs of the three model forms share one vocabulary") {
  GenotypeMatrix m = replicate_rows(d6(), 10);
  TreeModel t = reconstruct_tree(m, 0.5);
  ModelGraph tg = graph_of(t, m);
  CHECK(tg.nodes == std::set<std::string>{"<root>", "event:a", "event:b", "event:c"});
  CHECK(tg.edges.count({"<root>", "event:a"}) == 1);
  CHECK(tg.edges.count({"event:a", "event:b"}) == 1);
  CHECK(tg.edges.count({"event:b", "event:c"}) == 1);
  CHECK(tg.edges.size() == 3);

  GroundTruth gt = ground_truth_from_tree(t, m);
  ModelGraph gg = graph_of(gt, true);
  CHECK(gg.nodes == tg.nodes);
  CHECK(gg.edges == tg.edges);
  ModelGraph bare = graph_of(gt, false);
  CHECK(bare.nodes.count("<root>") == 0);
  CHECK(bare.edges.size() == 2);

  CapriParams params;
  params.seed = 4;
  CapriResult res = reconstruct(m, {}, params);
  ModelGraph pg = graph_of(res.models[0]);
  CHECK(pg.nodes == std::set<std::string>{"event:a", "event:b", "event:c"});
  CHECK(pg.edges ==
        std::set<std::pair<std::string, std::string>>{{"event:a", "event:b"},
                                                      {"event:b", "event:c"}});
}

TEST_CASE("edge distance counts the symmetric difference and needs one universe") {
  ModelGraph a{{"x", "y", "z"}, {{"x", "y"}, {"y", "z"}}};
  ModelGraph b{{"x", "y", "z"}, {{"x", "y"}, {"x", "z"}}};
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(a, b) == 2);
  CHECK(hamming_distance(b, a) == 2);

  ModelGraph c{{"x", "y"}, {{"x", "y"}}};
  CHECK_THROWS_WITH_AS(hamming_distance(a, c), doctest::Contains("node universes differ"),
                       DataError);
}

TEST_CASE("edge distance is a metric on graphs over a fixed universe") {
  Rng rng(303);
  std::vector<std::string> names = {"p", "q", "r", "s"};
  auto random_graph = [&]() {
    ModelGraph g;
    for (const auto& n : names) g.nodes.insert(n);
    for (const auto& u : names)
      for (const auto& v : names)
        if (u != v && rng.bernoulli(0.4)) g.edges.insert({u, v});
    return g;
  };
  for (int rep = 0; rep < 100; ++rep) {
    ModelGraph x = random_graph(), y = random_graph(), z = random_graph();
    CHECK(hamming_distance(x, x) == 0);
    CHECK(hamming_distance(x, y) == hamming_distance(y, x));
    CHECK(hamming_distance(x, z) <= hamming_distance(x, y) + hamming_distance(y, z));
    if (hamming_distance(x, y) == 0) CHECK(x.edges == y.edges);
  }
}

TEST_CASE("precision and recall with their empty-side conventions") {
  ModelGraph truth{{"x", "y", "z"}, {{"x", "y"}, {"y", "z"}}};
  ModelGraph good{{"x", "y", "z"}, {{"x", "y"}, {"y", "z"}}};
  ModelGraph part{{"x", "y", "z"}, {{"x", "y"}, {"x", "z"}}};
  ModelGraph none{{"x", "y", "z"}, {}};

  PrecisionRecall pr = precision_recall(good, truth);
  CHECK(pr.tp == 2);
  CHECK(pr.fp == 0);
  CHECK(pr.fn == 0);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);

  pr = precision_recall(part, truth);
  CHECK(pr.tp == 1);
  CHECK(pr.fp == 1);
  CHECK(pr.fn == 1);
  CHECK(pr.precision == 0.5);
  CHECK(pr.recall == 0.5);

  pr = precision_recall(none, truth);
  CHECK(pr.precision == 0.0);  // nothing predicted against a nonempty truth
  CHECK(pr.recall == 0.0);

  pr = precision_recall(none, none);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);

  pr = precision_recall(part, none);
  CHECK(pr.precision == 0.0);
  CHECK(pr.recall == 1.0);  // nothing to find
}

TEST_CASE("tree conversion rejects non-trees with specific complaints") {
  ModelGraph at_root{{"<root>", "x"}, {{"x", "<root>"}}};
  CHECK_THROWS_WITH_AS(tree_of(at_root), doctest::Contains("points at the root"), DataError);

  ModelGraph two_parents{{"x", "y", "z"}, {{"x", "z"}, {"y", "z"}}};
  CHECK_THROWS_WITH_AS(tree_of(two_parents), doctest::Contains("several parents"), DataError);

  ModelGraph loop{{"x", "y", "z"}, {{"x", "y"}, {"y", "z"}, {"z", "x"}}};
  CHECK_THROWS_WITH_AS(tree_of(loop), doctest::Contains("cycle"), DataError);
}

TEST_CASE("edit distance on hand-checked shapes") {
  auto graph = [](std::set<std::pair<std::string, std::string>> edges,
                  std::set<std::string> nodes) {
    ModelGraph g;
    g.nodes = std::move(nodes);
    g.edges = std::move(edges);
    return g;
  };

  LabeledTree chain = tree_of(graph({{"a", "b"}, {"b", "c"}}, {"a", "b", "c"}));
  LabeledTree chain2 = tree_of(graph({{"a", "b"}, {"b", "c"}}, {"a", "b", "c"}));
  LabeledTree swapped = tree_of(graph({{"a", "c"}, {"c", "b"}}, {"a", "b", "c"}));
  LabeledTree star = tree_of(graph({{"a", "b"}, {"a", "c"}}, {"a", "b", "c"}));
  LabeledTree hoisted = tree_of(graph({{"a", "b"}}, {"a", "b", "c"}));

  CHECK(tree_edit_distance(chain, chain2) == 0);
  CHECK(tree_edit_distance(chain, swapped) == 2);  // b and c trade places
  CHECK(tree_edit_distance(chain, star) == 2);     // c re-hangs one level up
  CHECK(tree_edit_distance(chain, hoisted) == 2);  // c re-hangs at the root
  CHECK(tree_edit_distance(star, hoisted) == 2);

  // distances agree with the enumeration oracle on these fixtures too
  CHECK(reference::ted(chain, swapped) == 2);
  CHECK(reference::ted(chain, star) == 2);
}

TEST_CASE("edit distance matches the recursive oracle on random trees") {
  Rng rng(909);
  for (int rep = 0; rep < 150; ++rep) {
    LabeledTree a = reference::random_tree(rng, 1 + rng.below(8));
    LabeledTree b = reference::random_tree(rng, 1 + rng.below(8));
    const std::size_t fast = tree_edit_distance(a, b);
    CHECK(fast == reference::ted(a, b));
    CHECK(fast == tree_edit_distance(b, a));  // unit costs are symmetric
    CHECK(tree_edit_distance(a, a) == 0);
  }
}

TEST_CASE("column order does not leak into the edit distance") {
  GenotypeMatrix m = replicate_rows(d6(), 10);
  std::vector<EventId> perm = {EventId{2}, EventId{0}, EventId{1}};
  GenotypeMatrix shuffled = m.take_columns(perm);

  LabeledTree t1 = tree_of(reconstruct_tree(m, 0.5), m);
  LabeledTree t2 = tree_of(reconstruct_tree(shuffled, 0.5), shuffled);
  CHECK(tree_edit_distance(t1, t2) == 0);
}

TEST_CASE("evaluate bundles the metrics and degrades without tree shape") {
  GenotypeMatrix m = replicate_rows(d6(), 10);
  TreeModel t = reconstruct_tree(m, 0.5);
  ModelGraph inferred = graph_of(t, m);
  ModelGraph truth = graph_of(ground_truth_from_tree(t, m), true);

  EvalReport rep = evaluate(inferred, truth);
  CHECK(rep.hamming == 0);
  CHECK(rep.pr.precision == 1.0);
  CHECK(rep.pr.recall == 1.0);
  REQUIRE(rep.has_ted);
  CHECK(rep.ted == 0);

  ModelGraph dag = truth;
  dag.edges.insert({"event:a", "event:c"});  // c now has two parents
  EvalReport rep2 = evaluate(inferred, dag);
  CHECK(rep2.hamming == 1);
  CHECK_FALSE(rep2.has_ted);
  CHECK(rep2.pr.fn == 1);
}
