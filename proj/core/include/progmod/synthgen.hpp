#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "progmod/dataset.hpp"

namespace progmod {

enum class TopologyKind { tree, forest, connected_dag, disconnected_dag };
std::string topology_kind_name(TopologyKind k);
TopologyKind topology_kind_from_name(const std::string& name);

struct TopologySpec {
  std::size_t n_events = 0;
  TopologyKind kind = TopologyKind::tree;
  std::size_t max_parents = 3;  // DAG kinds only
  double p_min = 0.05, p_max = 0.95;
  std::size_t components = 1;  // forest / disconnected_dag
  // DAG kinds: a child fires when a random nonempty subset of its parents
  // fired, instead of requiring all of them
  bool disjunctive = false;
  uint64_t seed = 0;
};

struct GroundTruthNode {
  std::string label;
  std::size_t level = 1;                 // 1 is a component root
  std::vector<std::size_t> parents;      // node ids, all on the previous level
  double fire_prob = 0;                  // P(fire | gate satisfied), in [p_min, p_max]
  double marginal = 0;                   // product-rule value; can drop below p_min
  // optional weights over nonempty parent subsets (index: bitmask-1 over the
  // sorted parent list); empty means uniform. Only read when disjunctive.
  std::vector<double> subset_weights;
};

struct GroundTruth {
  TopologyKind kind = TopologyKind::tree;
  bool disjunctive = false;
  uint64_t seed = 0;
  std::vector<GroundTruthNode> nodes;  // topologically ordered (levels ascending)

  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  bool is_forest() const;  // every node has at most one parent
};

// Levels are drawn uniformly on [2, max(2, ceil(log2 n))] per component and
// redrawn until every level is populated; parents come from the previous
// level. Component sizes are a uniform composition, redrawn until every part
// has at least two events.
GroundTruth random_topology(const TopologySpec& spec);

// Row r uses the stream derive_seed(seed, r): nodes are visited in
// topological order, a node fires only when its gate holds (all parents for
// conjunctive models, the drawn subset for disjunctive ones).
GenotypeMatrix sample_dataset(const GroundTruth& gt, std::size_t m_rows, uint64_t seed);

// each cell is replaced by a fair coin with probability nu
GenotypeMatrix apply_noise(const GenotypeMatrix& m, double nu, uint64_t seed);

// zeros flip up with probability eps_plus, ones flip down with eps_minus
GenotypeMatrix apply_asymmetric_noise(const GenotypeMatrix& m, double eps_plus, double eps_minus,
                                      uint64_t seed);

// Two mutually exclusive branch events feeding one child: each row picks the
// first branch with probability p_first, the picked event fires with
// branch_prob, and the child fires with child_prob when exactly one branch
// event is present. Ground truth for pattern-recovery experiments.
GenotypeMatrix sample_exclusive_branches(std::size_t m_rows, double p_first, double branch_prob,
                                         double child_prob, uint64_t seed);

}  // namespace progmod
