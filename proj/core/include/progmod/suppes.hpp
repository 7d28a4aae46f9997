#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "progmod/patterns.hpp"

namespace progmod {

// One-sided p-value for "a tends to be greater than b". Exact permutation
// enumeration when the pooled size is at most 20, otherwise the normal
// approximation with midranks, tie-corrected variance and continuity
// correction. Ties in the data are handled in both branches.
double mann_whitney_greater(const std::vector<double>& a, const std::vector<double>& b);

// Per-resample counts over all lifted columns. A resample is accepted only
// if every column is non-degenerate (0 < count < rows) and no two columns
// mark exactly the same row set; resample r draws from the stream
// derive_seed(seed, r), so acceptance is independent of evaluation order.
class BootstrapDistributions {
 public:
  BootstrapDistributions(std::size_t cols, std::size_t rows)
      : cols_(cols), rows_(rows), npairs_(cols * (cols - 1) / 2) {}

  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }
  std::size_t accepted() const { return marg_.size(); }
  std::size_t attempts() const { return attempts_; }

  std::size_t pair_index(std::size_t a, std::size_t b) const;

  // P_k(c), P_k(j|i), P_k(j|not i) across accepted resamples k
  std::vector<double> marginals(std::size_t c) const;
  std::vector<double> conditionals(std::size_t j, std::size_t i) const;
  std::vector<double> conditionals_negated(std::size_t j, std::size_t i) const;

  void push(std::vector<uint32_t> marg_counts, std::vector<uint32_t> joint_counts);
  void set_attempts(std::size_t a) { attempts_ = a; }

 private:
  std::size_t cols_, rows_, npairs_;
  std::size_t attempts_ = 0;
  std::vector<std::vector<uint32_t>> marg_;   // per accepted resample
  std::vector<std::vector<uint32_t>> joint_;  // upper triangle a < b
};

// max_attempts 0 means 100 * k_min. Throws DataError("degenerate data...")
// when too few resamples pass the acceptance conditions.
BootstrapDistributions bootstrap_distributions(const LiftedMatrix& lm, std::size_t k_min,
                                               uint64_t seed, std::size_t max_attempts = 0);

struct PfEdge {
  std::size_t from = 0, to = 0;  // lifted column ids
  double gamma = 0;              // P(from) - P(to), full data
  double lambda_pr = 0;          // P(to|from) - P(to|not from), full data
  double p_tp = 1, p_pr = 1;     // Mann-Whitney p-values over the resamples
};

// Candidate-cause graph: an edge survives only if both the marginal ordering
// and the probability-raising test hold at level alpha across the bootstrap
// distributions, and both point estimates are strictly positive. Clause
// columns never receive edges and may only point at their hypothesis targets.
struct PrimaFacieGraph {
  std::size_t cols = 0;
  std::vector<std::string> names;         // per column
  std::vector<bool> is_clause;
  std::vector<PfEdge> edges;

  bool has_edge(std::size_t from, std::size_t to) const;
  std::vector<std::vector<std::size_t>> adjacency() const;  // from -> list of to
  bool is_acyclic() const;
};

struct SuppesParams {
  double alpha = 0.05;
  std::size_t nboot = 100;        // accepted resamples to collect
  std::size_t min_boot = 3;       // fewest accepted resamples tolerated
  std::size_t max_attempts = 0;   // 0: 100 * nboot
  uint64_t seed = 0;
};

PrimaFacieGraph prima_facie_graph(const LiftedMatrix& lm, const BootstrapDistributions& dists,
                                  double alpha, std::size_t min_boot = 3);

// Drops edges until acyclic, worst first: largest max(p_tp, p_pr), ties by
// smaller lambda_pr, then lexical (from, to) names. Only edges currently on
// a cycle are candidates.
PrimaFacieGraph remove_cycles(PrimaFacieGraph g);

}  // namespace progmod
