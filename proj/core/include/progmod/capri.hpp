#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "progmod/suppes.hpp"

namespace progmod {

enum class Regularizer { bic, aic };
std::string regularizer_name(Regularizer r);
Regularizer regularizer_from_name(const std::string& name);

struct ScoreOptions {
  Regularizer reg = Regularizer::bic;
  // count 2^|parents|-1 free parameters per node instead of 2^|parents| rows
  bool free_params_dim = false;
};

// Per-node structure over lifted columns: parents[j] lists column ids,
// sorted ascending. Clause columns always have an empty parent list.
using Structure = std::vector<std::vector<std::size_t>>;

// Bernoulli likelihood of each column given its parents' joint
// configuration, with one pseudo-observation added to both cells of every
// observed configuration (so an event seen c times in m rows contributes
// c*ln((c+1)/(m+2)) + (m-c)*ln((m-c+1)/(m+2)) when it has no parents).
double log_likelihood(const LiftedMatrix& data, const Structure& parents);
double node_log_likelihood(const LiftedMatrix& data, std::size_t j,
                           const std::vector<std::size_t>& parents);

uint64_t dimension(const Structure& parents, bool free_params = false);

// bic: LL - ln(rows)/2 * dim; aic: LL - dim. Larger is better.
double regularized_score(const LiftedMatrix& data, const Structure& parents,
                         const ScoreOptions& opts);

struct HillClimbResult {
  Structure parents;
  double score = 0;
};

// Starts from the empty structure; every iteration proposes one random edge
// of the space to toggle and keeps it only on strict improvement. A restart
// stops at max_iter or once every distinct move has been rejected since the
// last accepted one (no neighbor improves). Restart r draws its proposals
// from derive_seed(seed, r); the best score wins, earliest restart on ties.
HillClimbResult hill_climb(const PrimaFacieGraph& space, const LiftedMatrix& data,
                           const ScoreOptions& opts, std::size_t max_iter, std::size_t restarts,
                           uint64_t seed, bool require_acyclic_space = true);

struct ModelEdge {
  std::size_t from = 0, to = 0;
  double lambda_pr = 0;  // probability-raising contrast, point estimate
  double p_tp = 1, p_pr = 1;
  double hyper_p = 1;    // upper-tail overlap p-value
};

struct ProgressionModel {
  std::vector<std::string> names;  // per lifted column
  std::vector<std::string> kinds;  // event kind, or "pattern" for clauses
  std::vector<bool> is_clause;
  Structure parents;
  std::vector<double> labeling;  // P(j), or P(j | all parents present)
  std::vector<ModelEdge> edges;
  Regularizer reg = Regularizer::bic;
  double score = 0;
  uint64_t seed = 0;
};

struct CapriParams {
  double alpha = 0.05;
  std::size_t nboot = 100;
  std::size_t min_boot = 3;
  std::size_t max_attempts = 0;  // 0: 100 * nboot
  std::vector<Regularizer> regs = {Regularizer::bic, Regularizer::aic};
  bool free_params_dim = false;
  std::size_t restarts = 10;
  std::size_t max_iter = 100000;
  uint64_t seed = 0;
};

struct CapriResult {
  PrimaFacieGraph pf;  // after cycle removal
  std::vector<ProgressionModel> models;  // one per requested regularizer
  std::size_t boot_accepted = 0, boot_attempts = 0;
};

CapriResult reconstruct(const GenotypeMatrix& m, const std::vector<Hypothesis>& hyps,
                        const CapriParams& params);

}  // namespace progmod
