#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "progmod/dataset.hpp"

namespace progmod {

// Pairwise ordered scores. alpha is the conditional-contrast ratio
//   (P(j|i) - P(j|not i)) / (P(j|i) + P(j|not i)),
// beta the joint-vs-product ratio
//   (P(i and j) - P(i)P(j)) / (P(i and j) + P(i)P(j)),
// and m their mix (1-lambda)*alpha + lambda*beta. Computed from integer
// counts with a single division per entry.
struct ShrinkageScores {
  std::size_t n = 0;
  double lambda = 0.5;
  std::vector<double> alpha, beta, m;  // row-major (i -> j), diagonal zero
  std::vector<uint8_t> defined;        // zero-denominator entries flagged

  double alpha_at(std::size_t i, std::size_t j) const { return alpha[i * n + j]; }
  double beta_at(std::size_t i, std::size_t j) const { return beta[i * n + j]; }
  double m_at(std::size_t i, std::size_t j) const { return m[i * n + j]; }
  bool defined_at(std::size_t i, std::size_t j) const { return defined[i * n + j] != 0; }
};

// requires every marginal strictly inside (0,1)
ShrinkageScores shrinkage_scores(const GenotypeMatrix& m, double lambda);

// Rooted single-parent model over all events. Events whose best candidate
// cause scores non-positive, or which the independence filter separates,
// attach to the synthetic root instead.
struct TreeModel {
  std::vector<std::optional<EventId>> parent;  // nullopt: attached to the root
  std::vector<double> edge_score;  // m score of the chosen edge; root edges carry m/(m+count)
  std::vector<double> labeling;    // P(j|parent), or P(j) for root attachment
  std::vector<double> marginal;    // observed P(j)
  double lambda = 0.5;
};

TreeModel reconstruct_tree(const GenotypeMatrix& m, double lambda);

// log of P(a)/(P(a)+P(b)) * P(a and b)/(P(a)P(b)); -inf when the joint count
// is zero
double desper_weight(const GenotypeMatrix& m, EventId a, EventId b);

}  // namespace progmod
