#pragma once

#include <set>
#include <string>
#include <vector>

#include "progmod/capri.hpp"
#include "progmod/caprese.hpp"
#include "progmod/synthgen.hpp"

namespace progmod {

// Minimal comparable form of any fitted or generating model.
struct ModelGraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
};

// tree graphs include the synthetic "<root>" and its outgoing edges
ModelGraph graph_of(const TreeModel& t, const GenotypeMatrix& m);
ModelGraph graph_of(const ProgressionModel& pm);
ModelGraph graph_of(const GroundTruth& gt, bool with_root);

// number of directed adjacencies present in exactly one of the two graphs;
// requires the same node universe
std::size_t hamming_distance(const ModelGraph& a, const ModelGraph& b);

struct PrecisionRecall {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0;
};
PrecisionRecall precision_recall(const ModelGraph& inferred, const ModelGraph& truth);

// Rooted tree with children ordered by label; the shape the edit distance
// runs on. Parentless nodes hang under a synthetic root labelled "<root>".
struct LabeledTree {
  struct Node {
    std::string label;
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes;
  std::size_t root = 0;
};

LabeledTree tree_of(const TreeModel& t, const GenotypeMatrix& m);
LabeledTree tree_of(const GroundTruth& gt);
// from an edge list; throws DataError when some node has two parents
LabeledTree tree_of(const ModelGraph& g);

// ordered tree edit distance, unit insert/delete/relabel costs
std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b);

struct EvalReport {
  std::size_t hamming = 0;
  PrecisionRecall pr;
  bool has_ted = false;
  std::size_t ted = 0;
};

// compares like against like; TED only when both sides are single-parent
EvalReport evaluate(const ModelGraph& inferred, const ModelGraph& truth);

}  // namespace progmod
