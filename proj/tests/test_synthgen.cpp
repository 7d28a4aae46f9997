#include <doctest.h>

#include <progmod/errors.hpp>
#include <progmod/rng.hpp>
#include <progmod/synthgen.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"

using namespace progmod;

namespace {

std::size_t level_cap_of(std::size_t n) {
  std::size_t cap = 0, pow = 1;
  while (pow < n) {
    pow *= 2;
    ++cap;
  }
  return std::max<std::size_t>(2, cap);
}

void check_invariants(const GroundTruth& gt, const TopologySpec& spec) {
  const bool dag = spec.kind == TopologyKind::connected_dag ||
                   spec.kind == TopologyKind::disconnected_dag;
  std::size_t roots = 0;
  std::set<std::string> labels;
  for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
    const auto& node = gt.nodes[j];
    labels.insert(node.label);
    CHECK(node.fire_prob >= spec.p_min);
    CHECK(node.fire_prob <= spec.p_max);
    if (node.parents.empty()) {
      ++roots;
      CHECK(node.level == 1);
      CHECK(node.marginal == node.fire_prob);
    } else {
      CHECK(node.level >= 2);
      CHECK(node.parents.size() <= (dag ? spec.max_parents : 1));
      double prod = 1.0;
      for (std::size_t p : node.parents) {
        CHECK(p < j);  // topological order
        CHECK(gt.nodes[p].level == node.level - 1);
        prod *= gt.nodes[p].marginal;
      }
      CHECK(node.marginal == doctest::Approx(node.fire_prob * prod).epsilon(1e-12));
    }
  }
  CHECK(labels.size() == gt.nodes.size());

  const bool multi = spec.kind == TopologyKind::forest ||
                     spec.kind == TopologyKind::disconnected_dag;
  CHECK(roots == (multi ? spec.components : 1));
  if (!dag) CHECK(gt.is_forest());

  // every level of every component is populated and none exceeds the cap
  // implied by the component size; with one component this is checkable
  if (!multi) {
    std::set<std::size_t> levels;
    std::size_t top = 0;
    for (const auto& node : gt.nodes) {
      levels.insert(node.level);
      top = std::max(top, node.level);
    }
    CHECK(top <= level_cap_of(gt.nodes.size()));
    CHECK(levels.size() == top);
  }

  CHECK(gt.edges().size() >= gt.nodes.size() - (multi ? spec.components : 1));
}

}  // namespace

TEST_CASE("topology kind names round trip") {
  for (TopologyKind k : {TopologyKind::tree, TopologyKind::forest, TopologyKind::connected_dag,
                         TopologyKind::disconnected_dag})
    CHECK(topology_kind_from_name(topology_kind_name(k)) == k);
  CHECK(topology_kind_name(TopologyKind::connected_dag) == "connected-dag");
  CHECK_THROWS_AS(topology_kind_from_name("lattice"), DataError);
}

TEST_CASE("random topologies satisfy their structural contract") {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    TopologySpec tree;
    tree.n_events = 12;
    tree.kind = TopologyKind::tree;
    tree.seed = seed;
    check_invariants(random_topology(tree), tree);

    TopologySpec forest;
    forest.n_events = 13;
    forest.kind = TopologyKind::forest;
    forest.components = 3;
    forest.seed = seed;
    check_invariants(random_topology(forest), forest);

    TopologySpec dag;
    dag.n_events = 11;
    dag.kind = TopologyKind::connected_dag;
    dag.max_parents = 3;
    dag.seed = seed;
    check_invariants(random_topology(dag), dag);

    TopologySpec ddag;
    ddag.n_events = 10;
    ddag.kind = TopologyKind::disconnected_dag;
    ddag.components = 2;
    ddag.disjunctive = true;
    ddag.seed = seed;
    GroundTruth gt = random_topology(ddag);
    check_invariants(gt, ddag);
    CHECK(gt.disjunctive);
  }

  // the disjunctive flag only means something for dag kinds
  TopologySpec t;
  t.n_events = 8;
  t.kind = TopologyKind::tree;
  t.disjunctive = true;
  CHECK_FALSE(random_topology(t).disjunctive);
}

TEST_CASE("topology generation rejects unsatisfiable requests") {
  TopologySpec s;
  s.n_events = 1;
  CHECK_THROWS_WITH_AS(random_topology(s), doctest::Contains("at least two events"), DataError);

  s.n_events = 10;
  s.p_min = 0.8;
  s.p_max = 0.2;
  CHECK_THROWS_WITH_AS(random_topology(s), doctest::Contains("probability bounds"), DataError);

  s = TopologySpec{};
  s.n_events = 10;
  s.p_min = 0.0;
  CHECK_THROWS_AS(random_topology(s), DataError);

  s = TopologySpec{};
  s.n_events = 3;
  s.kind = TopologyKind::forest;
  s.components = 2;
  CHECK_THROWS_WITH_AS(random_topology(s), doctest::Contains("at least two events"), DataError);

  s = TopologySpec{};
  s.n_events = 6;
  s.kind = TopologyKind::connected_dag;
  s.max_parents = 0;
  CHECK_THROWS_AS(random_topology(s), DataError);
}

TEST_CASE("same seed, same topology; same seed, same dataset; rows are independent streams") {
  TopologySpec spec;
  spec.n_events = 9;
  spec.kind = TopologyKind::connected_dag;
  spec.seed = 42;

  GroundTruth g1 = random_topology(spec);
  GroundTruth g2 = random_topology(spec);
  REQUIRE(g1.nodes.size() == g2.nodes.size());
  for (std::size_t j = 0; j < g1.nodes.size(); ++j) {
    CHECK(g1.nodes[j].parents == g2.nodes[j].parents);
    CHECK(g1.nodes[j].fire_prob == g2.nodes[j].fire_prob);
  }

  GenotypeMatrix a = sample_dataset(g1, 200, 7);
  GenotypeMatrix b = sample_dataset(g1, 200, 7);
  GenotypeMatrix c = sample_dataset(g1, 80, 7);
  for (std::size_t r = 0; r < 200; ++r)
    for (std::size_t e = 0; e < a.cols(); ++e) {
      CHECK(a.at(r, EventId{e}) == b.at(r, EventId{e}));
      if (r < 80) CHECK(a.at(r, EventId{e}) == c.at(r, EventId{e}));
    }

  CHECK_THROWS_WITH_AS(sample_dataset(g1, 0, 7), doctest::Contains("at least one row"),
                       DataError);
}

TEST_CASE("conjunctive sampling respects gates and hits the product-rule marginals") {
  TopologySpec spec;
  spec.n_events = 7;
  spec.kind = TopologyKind::tree;
  spec.p_min = 0.3;
  spec.p_max = 0.9;
  spec.seed = 5;
  GroundTruth gt = random_topology(spec);
  GenotypeMatrix m = sample_dataset(gt, 20000, 11);

  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t j = 0; j < gt.nodes.size(); ++j)
      if (m.at(r, EventId{j}))
        for (std::size_t p : gt.nodes[j].parents) REQUIRE(m.at(r, EventId{p}));

  for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
    const double se =
        3.0 * std::sqrt(gt.nodes[j].marginal * (1.0 - gt.nodes[j].marginal) / 20000.0);
    CHECK(std::abs(m.marginal(EventId{j}) - gt.nodes[j].marginal) < se + 1e-3);
  }
}

TEST_CASE("disjunctive gates draw uniform nonempty parent subsets") {
  GroundTruth gt;
  gt.kind = TopologyKind::disconnected_dag;
  gt.disjunctive = true;
  gt.nodes.resize(3);
  gt.nodes[0] = {"a", 1, {}, 0.6, 0.6, {}};
  gt.nodes[1] = {"b", 1, {}, 0.5, 0.5, {}};
  gt.nodes[2] = {"c", 2, {0, 1}, 0.8, 0.0, {}};

  GenotypeMatrix m = sample_dataset(gt, 30000, 3);
  // subsets {a}, {b}, {a,b} each picked a third of the time; parents fire
  // independently, so P(c) = 0.8 * (0.6 + 0.5 + 0.3) / 3
  const double expect = 0.8 * (0.6 + 0.5 + 0.6 * 0.5) / 3.0;
  CHECK(m.marginal(EventId{2}) == doctest::Approx(expect).epsilon(0.05));

  // a disjunctive child can fire without all parents, but not without any
  bool missing_one = false;
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m.at(r, EventId{2})) {
      const bool pa = m.at(r, EventId{0}), pb = m.at(r, EventId{1});
      REQUIRE((pa || pb));
      missing_one = missing_one || !(pa && pb);
    }
  CHECK(missing_one);
}

TEST_CASE("subset weights pin the gate exactly") {
  GroundTruth gt;
  gt.kind = TopologyKind::disconnected_dag;
  gt.disjunctive = true;
  gt.nodes.resize(3);
  gt.nodes[0] = {"a", 1, {}, 0.6, 0.6, {}};
  gt.nodes[1] = {"b", 1, {}, 0.5, 0.5, {}};
  gt.nodes[2] = {"c", 2, {0, 1}, 0.9, 0.0, {0.0, 0.0, 1.0}};  // gate: both parents

  GenotypeMatrix m = sample_dataset(gt, 4000, 9);
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m.at(r, EventId{2})) {
      REQUIRE(m.at(r, EventId{0}));
      REQUIRE(m.at(r, EventId{1}));
    }
  CHECK(m.marginal(EventId{2}) == doctest::Approx(0.9 * 0.3).epsilon(0.1));

  gt.nodes[2].subset_weights = {1.0, 0.0};  // three parents' worth missing
  CHECK_THROWS_WITH_AS(sample_dataset(gt, 10, 1), doctest::Contains("subset weights"),
                       DataError);
}

TEST_CASE("symmetric noise replaces cells by fair coins") {
  TopologySpec spec;
  spec.n_events = 6;
  spec.kind = TopologyKind::tree;
  spec.seed = 19;
  GroundTruth gt = random_topology(spec);
  GenotypeMatrix m = sample_dataset(gt, 10000, 23);

  CHECK_THROWS_AS(apply_noise(m, -0.01, 1), std::invalid_argument);
  CHECK_THROWS_AS(apply_noise(m, 1.01, 1), std::invalid_argument);

  GenotypeMatrix clean = apply_noise(m, 0.0, 1);
  std::size_t diff = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      diff += clean.at(r, EventId{c}) != m.at(r, EventId{c});
  CHECK(diff == 0);

  const double nu = 0.2;
  GenotypeMatrix noisy = apply_noise(m, nu, 1);
  diff = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      diff += noisy.at(r, EventId{c}) != m.at(r, EventId{c});
  // a touched cell changes half the time: expected flip rate nu/2
  const double rate = static_cast<double>(diff) / static_cast<double>(m.rows() * m.cols());
  CHECK(rate == doctest::Approx(nu / 2.0).epsilon(0.08));

  GenotypeMatrix coins = apply_noise(m, 1.0, 2);
  double ones = 0;
  for (std::size_t c = 0; c < m.cols(); ++c) ones += coins.marginal(EventId{c});
  CHECK(ones / static_cast<double>(m.cols()) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("asymmetric noise flips the two directions at their own rates") {
  TopologySpec spec;
  spec.n_events = 5;
  spec.kind = TopologyKind::tree;
  spec.p_min = 0.3;
  spec.p_max = 0.7;
  spec.seed = 31;
  GroundTruth gt = random_topology(spec);
  GenotypeMatrix m = sample_dataset(gt, 20000, 41);

  CHECK_THROWS_AS(apply_asymmetric_noise(m, 0.6, 0.6, 1), std::invalid_argument);
  CHECK_THROWS_AS(apply_asymmetric_noise(m, -0.1, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(apply_asymmetric_noise(m, 0.0, 1.0, 1), std::invalid_argument);

  const double ep = 0.15, em = 0.25;
  GenotypeMatrix noisy = apply_asymmetric_noise(m, ep, em, 77);
  std::size_t up = 0, down = 0, zeros = 0, ones = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const bool was = m.at(r, EventId{c}), is = noisy.at(r, EventId{c});
      (was ? ones : zeros)++;
      if (!was && is) ++up;
      if (was && !is) ++down;
    }
  CHECK(static_cast<double>(up) / static_cast<double>(zeros) == doctest::Approx(ep).epsilon(0.05));
  CHECK(static_cast<double>(down) / static_cast<double>(ones) == doctest::Approx(em).epsilon(0.05));

  // with no downward noise the observed events only grow
  GenotypeMatrix grown = apply_asymmetric_noise(m, 0.1, 0.0, 78);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.at(r, EventId{c})) REQUIRE(grown.at(r, EventId{c}));

  // corrupted marginal: P*(i) = P(i)(1 - em) + (1 - P(i)) ep
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double p = m.marginal(EventId{c});
    const double star = p * (1.0 - em) + (1.0 - p) * ep;
    CHECK(noisy.marginal(EventId{c}) == doctest::Approx(star).epsilon(0.05));
  }
}

TEST_CASE("exclusive branches never fire together and feed the child") {
  GenotypeMatrix m = sample_exclusive_branches(20000, 0.7, 0.9, 0.5, 61);
  REQUIRE(m.cols() == 3);
  CHECK(m.event(EventId{0}).label == "a");

  for (std::size_t r = 0; r < m.rows(); ++r) {
    REQUIRE_FALSE((m.at(r, EventId{0}) && m.at(r, EventId{1})));
    if (m.at(r, EventId{2})) REQUIRE((m.at(r, EventId{0}) || m.at(r, EventId{1})));
  }

  CHECK(m.marginal(EventId{0}) == doctest::Approx(0.63).epsilon(0.05));
  CHECK(m.marginal(EventId{1}) == doctest::Approx(0.27).epsilon(0.07));
  CHECK(m.marginal(EventId{2}) == doctest::Approx(0.45).epsilon(0.05));

  GenotypeMatrix a = sample_exclusive_branches(50, 0.7, 0.9, 0.5, 61);
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t e = 0; e < 3; ++e)
      CHECK(a.at(r, EventId{e}) == m.at(r, EventId{e}));

  CHECK_THROWS_AS(sample_exclusive_branches(0, 0.7, 0.9, 0.5, 1), DataError);
}
