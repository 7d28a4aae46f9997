#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "progmod/capri.hpp"
#include "progmod/caprese.hpp"
#include "progmod/synthgen.hpp"

namespace progmod {

// Which reconstruction a bootstrap scheme reruns on each replicate.
struct AlgoConfig {
  enum class Kind { caprese, capri };
  Kind kind = Kind::caprese;
  double lambda = 0.5;                  // caprese
  CapriParams capri;                    // capri
  std::vector<Hypothesis> hypotheses;   // capri lifting
};

// Edge keys are "from -> to" over canonical node names; tree models use
// "<root>" for the synthetic root. Frequencies divide by nboot: iterations
// whose replicate was degenerate for the algorithm count as skipped and
// contribute to no edge.
struct BootstrapReport {
  std::string kind;         // nonparametric | statistical | parametric
  std::string regularizer;  // "none" for caprese
  std::size_t nboot = 0;
  std::size_t skipped = 0;
  double model_freq = 0;  // fraction of iterations reproducing the reference edge set exactly
  std::map<std::string, double> edge_freq;
  std::map<std::string, double> reference_edges;  // reference edge -> its frequency
};

// rows resampled with replacement (stream derive_seed(seed, iter)), the
// algorithm rerun, edges tallied against the reference fit on the input
std::vector<BootstrapReport> nonparametric_bootstrap(const GenotypeMatrix& m,
                                                     const AlgoConfig& algo, std::size_t nboot,
                                                     uint64_t seed);

// data fixed, the capri seed varies: iteration i runs with derive_seed(seed, i)
std::vector<BootstrapReport> statistical_bootstrap(const GenotypeMatrix& m,
                                                   const CapriParams& params,
                                                   const std::vector<Hypothesis>& hyps,
                                                   std::size_t nboot, uint64_t seed);

// datasets redrawn from a known model, optionally corrupted by asymmetric
// noise, the algorithm rerun, edges tallied against that model
std::vector<BootstrapReport> parametric_bootstrap(const GroundTruth& gt, std::size_t m_rows,
                                                  double eps_plus, double eps_minus,
                                                  const AlgoConfig& algo, std::size_t nboot,
                                                  uint64_t seed);

// single-parent sampling model from a fitted tree: fire_prob is the fitted
// conditional P(child | parent)
GroundTruth ground_truth_from_tree(const TreeModel& tree, const GenotypeMatrix& m);

// conjunctive sampling model from a fitted progression model; clause columns
// are rejected since their gating is not expressible as plain events
GroundTruth ground_truth_from_progression(const ProgressionModel& pm);

// P(overlap of count_a draws and count_b marked rows >= observed) under the
// hypergeometric null on n_rows exchangeable rows
double hypergeometric_upper_tail(std::size_t n_rows, std::size_t count_a, std::size_t count_b,
                                 std::size_t overlap);
double hypergeometric_overlap(const GenotypeMatrix& m, EventId a, EventId b);

}  // namespace progmod
