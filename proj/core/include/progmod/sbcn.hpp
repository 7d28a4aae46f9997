#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "progmod/capri.hpp"
#include "progmod/dataset.hpp"

namespace progmod {

// Rectangular categorical records: one string value per attribute per row.
struct CategoricalTable {
  std::vector<std::string> attributes;
  std::vector<std::string> samples;
  std::vector<std::vector<std::string>> rows;  // rows[i][a]
};

// Delimited text with a header line; the first column holds record ids.
CategoricalTable import_table(std::istream& in, char delim = ',');
void write_table(std::ostream& out, const CategoricalTable& t, char delim = ',');

// Stage per attribute; smaller comes earlier. Must cover every attribute of
// the table it is applied to, extra entries are ignored.
struct TemporalOrder {
  std::map<std::string, std::size_t> level;
};

struct Binarized {
  GenotypeMatrix matrix;           // one column per observed attribute=value,
                                   // kind = attribute, label = value
  std::vector<std::size_t> level;  // per column, inherited from the attribute
};

// Exactly one set bit per attribute per row. Throws DataError on empty cells
// or attributes missing from the order.
Binarized binarize(const CategoricalTable& t, const TemporalOrder& order);

struct SbcnEdge {
  std::size_t from = 0, to = 0;
  double weight = 0;  // P(to|from) - P(to|not from), in (0, 1]
};

// Weighted DAG over attribute=value nodes with two designated decision
// poles. Every edge goes from an earlier-or-equal stage to a later-or-equal
// one and strictly raises the probability of its head.
struct Sbcn {
  std::vector<EventMeta> nodes;  // kind = attribute, label = value
  std::vector<std::size_t> level;
  std::vector<SbcnEdge> edges;  // sorted by (from, to)
  std::size_t decision_neg = 0, decision_pos = 0;
  Regularizer reg = Regularizer::bic;
  double score = 0;
  uint64_t seed = 0;

  std::string node_name(std::size_t v) const { return nodes[v].kind + "=" + nodes[v].label; }
  // resolves "attribute=value" (or the kind:label form); throws DataError
  std::size_t find(const std::string& name) const;
  // out[v] lists (head, weight) sorted by head
  std::vector<std::vector<std::pair<std::size_t, double>>> out_adjacency() const;
};

struct SbcnParams {
  Regularizer reg = Regularizer::bic;
  std::size_t max_iter = 100000;
  std::size_t restarts = 10;
  uint64_t seed = 0;
  std::string decision_neg, decision_pos;  // "attribute=value"
};

// Keeps the ordered pairs whose stage is non-decreasing and whose
// probability-raising point estimate is strictly positive, then fits a DAG
// over that space by regularized hill climbing. No resampling is involved,
// the filter works on full-data counts.
Sbcn learn_sbcn(const GenotypeMatrix& m, const std::vector<std::size_t>& level,
                const SbcnParams& params);

struct WalkScores {
  double ds_neg = 0;  // fraction of walks absorbed at the negative pole
  std::size_t reached_neg = 0, reached_pos = 0;
  double as_neg = 0, as_pos = 0;  // mean hops, meaningful only when reached
  bool has_fed = false;
  double fed = 0;
  bool has_gds = false;
  double gds_neg = 0;
};

// n_walks weighted random walks from v, each absorbed at the first decision
// pole it reaches. A walk that runs into a sink restarts from v and the
// aborted attempt is discarded; the per-walk hop budget (restarts included)
// is one million. Throws DataError when neither pole is reachable from v.
WalkScores group_discrimination(const Sbcn& s, std::size_t v, std::size_t n_walks, uint64_t seed);

// Fraction of the negatively absorbed walks from v that passed through at
// least one mediator. Throws DataError when no walk reaches the negative
// pole.
double explainable_fraction(const Sbcn& s, std::size_t v, const std::vector<std::size_t>& mediators,
                            std::size_t n_walks, uint64_t seed);

// Stationary restart-walk distribution: restart mass is uniform over seeds,
// transitions are weight-proportional, sinks hand their mass back to the
// seeds. Iterates to an l1 residual of 1e-12. The result sums to one.
std::vector<double> personalized_pagerank(const Sbcn& s, const std::vector<std::size_t>& seeds,
                                          double damping = 0.85);

// ppr(neg) / (ppr(neg) + ppr(pos)); throws DataError when both poles carry
// zero mass.
double generalized_score(const Sbcn& s, const std::vector<std::size_t>& seeds,
                         double damping = 0.85);

}  // namespace progmod
