#include "progmod/caprese.hpp"

#include <cmath>
#include <limits>

#include "progmod/errors.hpp"

namespace progmod {

ShrinkageScores shrinkage_scores(const GenotypeMatrix& gm, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda outside [0,1]");
  const std::size_t n = gm.cols();
  const int64_t m = static_cast<int64_t>(gm.rows());

  std::vector<int64_t> cnt(n);
  for (std::size_t c = 0; c < n; ++c) {
    cnt[c] = static_cast<int64_t>(gm.count(EventId{c}));
    if (cnt[c] == 0 || cnt[c] == m)
      throw DataError("degenerate marginal for event " + gm.event(EventId{c}).name());
  }

  ShrinkageScores s;
  s.n = n;
  s.lambda = lambda;
  s.alpha.assign(n * n, 0.0);
  s.beta.assign(n * n, 0.0);
  s.m.assign(n * n, 0.0);
  s.defined.assign(n * n, 0);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int64_t ci = cnt[i], cj = cnt[j];
      const int64_t cij = static_cast<int64_t>(gm.count_joint(EventId{i}, EventId{j}));

      // alpha: numerator cij*(m-ci) - ci*(cj-cij), denominator with + instead
      const int64_t a_pos = cij * (m - ci), a_neg = ci * (cj - cij);
      // beta over the common denominator m: cij*m vs ci*cj
      const int64_t b_pos = cij * m, b_neg = ci * cj;

      const std::size_t k = i * n + j;
      if (a_pos + a_neg == 0 || b_pos + b_neg == 0) continue;  // left undefined
      s.defined[k] = 1;
      s.alpha[k] = static_cast<double>(a_pos - a_neg) / static_cast<double>(a_pos + a_neg);
      s.beta[k] = static_cast<double>(b_pos - b_neg) / static_cast<double>(b_pos + b_neg);
      s.m[k] = (1.0 - lambda) * s.alpha[k] + lambda * s.beta[k];
    }
  return s;
}

TreeModel reconstruct_tree(const GenotypeMatrix& gm, double lambda) {
  const ShrinkageScores s = shrinkage_scores(gm, lambda);
  const std::size_t n = gm.cols();
  const int64_t m = static_cast<int64_t>(gm.rows());

  std::vector<int64_t> cnt(n);
  for (std::size_t c = 0; c < n; ++c) cnt[c] = static_cast<int64_t>(gm.count(EventId{c}));

  TreeModel t;
  t.lambda = lambda;
  t.parent.assign(n, std::nullopt);
  t.edge_score.assign(n, 0.0);
  t.labeling.assign(n, 0.0);
  t.marginal.assign(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    t.marginal[j] = static_cast<double>(cnt[j]) / static_cast<double>(m);

    // best candidate cause: positive score, wins the reverse direction,
    // maximal m; ties go to the larger beta, then the smaller column
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j || !s.defined_at(i, j)) continue;
      const double mij = s.m_at(i, j);
      if (mij <= 0.0 || mij <= s.m_at(j, i)) continue;
      if (!best || mij > s.m_at(*best, j) ||
          (mij == s.m_at(*best, j) && s.beta_at(i, j) > s.beta_at(*best, j)))
        best = i;
    }

    if (best) {
      // independence filter: drop the chosen cause when every event more
      // frequent than j looks no better than the baseline 1/(1+P(j)),
      // i.e. when (cx+cj)*cj > cxj*(m+cj) for all such x (exact in counts)
      bool all_below = true;
      for (std::size_t x = 0; x < n && all_below; ++x) {
        if (x == j || cnt[x] <= cnt[j]) continue;
        const int64_t cxj = static_cast<int64_t>(gm.count_joint(EventId{x}, EventId{j}));
        all_below = (cnt[x] + cnt[j]) * cnt[j] > cxj * (m + cnt[j]);
      }
      if (all_below) best.reset();
    }

    if (best) {
      t.parent[j] = EventId{*best};
      t.edge_score[j] = s.m_at(*best, j);
      const int64_t cij = static_cast<int64_t>(gm.count_joint(EventId{*best}, EventId{j}));
      t.labeling[j] = static_cast<double>(cij) / static_cast<double>(cnt[*best]);
    } else {
      t.edge_score[j] = static_cast<double>(m) / static_cast<double>(m + cnt[j]);
      t.labeling[j] = t.marginal[j];
    }
  }
  return t;
}

double desper_weight(const GenotypeMatrix& gm, EventId a, EventId b) {
  const double m = static_cast<double>(gm.rows());
  const double ca = static_cast<double>(gm.count(a));
  const double cb = static_cast<double>(gm.count(b));
  const double cab = static_cast<double>(gm.count_joint(a, b));
  if (ca == 0.0 || cb == 0.0) throw DataError("degenerate marginal");
  if (cab == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(ca / (ca + cb) * (cab * m) / (ca * cb));
}

}  // namespace progmod
