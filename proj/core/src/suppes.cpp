#include "progmod/suppes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "progmod/errors.hpp"
#include "progmod/rng.hpp"

namespace progmod {

namespace {

// exact tail: enumerate splits of the pooled sample by value class; the
// distribution of 2U fits in an integer-indexed table
double exact_mw_tail(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  std::sort(pool.begin(), pool.end());

  std::vector<std::size_t> class_count;
  std::vector<double> class_value;
  for (double v : pool) {
    if (class_value.empty() || v != class_value.back()) {
      class_value.push_back(v);
      class_count.push_back(0);
    }
    ++class_count.back();
  }

  const std::size_t na = a.size(), nb = b.size();
  // observed 2U: wins count twice, ties once
  long u2_obs = 0;
  for (double x : a)
    for (double y : b) u2_obs += x > y ? 2 : x == y ? 1 : 0;

  // dp[c][u2] = number of ways to choose c pooled elements as group "a"
  // with statistic 2U = u2; scanning classes in ascending value order keeps
  // the "wins against smaller unchosen" term a function of the prefix.
  const std::size_t u2_max = 2 * na * nb;
  std::vector<std::vector<double>> dp(na + 1, std::vector<double>(u2_max + 1, 0.0));
  dp[0][0] = 1.0;

  // binomial table up to the largest class
  std::size_t tmax = *std::max_element(class_count.begin(), class_count.end());
  std::vector<std::vector<double>> binom(tmax + 1, std::vector<double>(tmax + 1, 0.0));
  for (std::size_t i = 0; i <= tmax; ++i) {
    binom[i][0] = 1.0;
    for (std::size_t j = 1; j <= i; ++j)
      binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0.0);
  }

  std::size_t prefix_total = 0;
  for (std::size_t cl = 0; cl < class_count.size(); ++cl) {
    const std::size_t t = class_count[cl];
    std::vector<std::vector<double>> next(na + 1, std::vector<double>(u2_max + 1, 0.0));
    for (std::size_t c = 0; c <= na; ++c)
      for (std::size_t u2 = 0; u2 <= u2_max; ++u2) {
        if (dp[c][u2] == 0.0) continue;
        for (std::size_t k = 0; k <= t && c + k <= na; ++k) {
          // k chosen here beat every unchosen element below this class and
          // tie with the t-k unchosen elements of the class
          std::size_t gain = 2 * k * (prefix_total - c) + k * (t - k);
          // gains never decrease, so a partial statistic past the final
          // maximum belongs to a selection that cannot reach size na
          if (u2 + gain > u2_max) continue;
          next[c + k][u2 + gain] += dp[c][u2] * binom[t][k];
        }
      }
    dp.swap(next);
    prefix_total += t;
  }

  double ge = 0.0, total = 0.0;
  for (std::size_t u2 = 0; u2 <= u2_max; ++u2) {
    total += dp[na][u2];
    if (static_cast<long>(u2) >= u2_obs) ge += dp[na][u2];
  }
  return ge / total;
}

double normal_mw_tail(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double n = na + nb;

  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return pool[x] < pool[y]; });

  // midranks and the tie term sum(t^3 - t)
  std::vector<double> rank(pool.size());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && pool[order[j + 1]] == pool[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  double ra = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) ra += rank[k];
  const double u = ra - na * (na + 1.0) / 2.0;
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return u > mu ? 0.0 : 1.0;  // every pooled value tied
  const double z = (u - mu - 0.5) / std::sqrt(var);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

double mann_whitney_greater(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw DataError("mann_whitney_greater: empty sample");
  if (a.size() + b.size() <= 20) return exact_mw_tail(a, b);
  return normal_mw_tail(a, b);
}

std::size_t BootstrapDistributions::pair_index(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  // position of (a,b), a < b, in row-major upper-triangle order
  return a * cols_ - a * (a + 1) / 2 + (b - a - 1);
}

std::vector<double> BootstrapDistributions::marginals(std::size_t c) const {
  std::vector<double> out(marg_.size());
  for (std::size_t k = 0; k < marg_.size(); ++k)
    out[k] = static_cast<double>(marg_[k][c]) / static_cast<double>(rows_);
  return out;
}

std::vector<double> BootstrapDistributions::conditionals(std::size_t j, std::size_t i) const {
  std::vector<double> out(marg_.size());
  for (std::size_t k = 0; k < marg_.size(); ++k)
    out[k] = static_cast<double>(joint_[k][pair_index(i, j)]) / static_cast<double>(marg_[k][i]);
  return out;
}

std::vector<double> BootstrapDistributions::conditionals_negated(std::size_t j,
                                                                 std::size_t i) const {
  std::vector<double> out(marg_.size());
  for (std::size_t k = 0; k < marg_.size(); ++k) {
    const uint32_t num = marg_[k][j] - joint_[k][pair_index(i, j)];
    const uint32_t den = static_cast<uint32_t>(rows_) - marg_[k][i];
    out[k] = static_cast<double>(num) / static_cast<double>(den);
  }
  return out;
}

void BootstrapDistributions::push(std::vector<uint32_t> marg_counts,
                                  std::vector<uint32_t> joint_counts) {
  marg_.push_back(std::move(marg_counts));
  joint_.push_back(std::move(joint_counts));
}

BootstrapDistributions bootstrap_distributions(const LiftedMatrix& lm, std::size_t k_min,
                                               uint64_t seed, std::size_t max_attempts) {
  const std::size_t m = lm.rows(), w = lm.cols();
  if (k_min == 0) throw DataError("bootstrap needs at least one resample");
  if (max_attempts == 0) max_attempts = 100 * k_min;

  // columns packed over rows once; resampled columns are regathered per draw
  const std::size_t words = (m + 63) / 64;
  std::vector<std::vector<uint64_t>> packed(w, std::vector<uint64_t>(words, 0));
  for (std::size_t c = 0; c < w; ++c)
    for (std::size_t r = 0; r < m; ++r)
      if (lm.at(r, c)) packed[c][r / 64] |= uint64_t{1} << (r % 64);

  BootstrapDistributions out(w, m);
  std::vector<std::vector<uint64_t>> res(w, std::vector<uint64_t>(words));
  std::vector<std::size_t> idx(m);

  std::size_t attempts = 0;
  for (std::size_t r = 0; out.accepted() < k_min && r < max_attempts; ++r) {
    ++attempts;
    Rng rng(derive_seed(seed, r));
    for (std::size_t i = 0; i < m; ++i) idx[i] = rng.below(m);

    for (auto& col : res) std::fill(col.begin(), col.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t src = idx[i];
      const uint64_t srcbit = uint64_t{1} << (src % 64);
      const std::size_t srcw = src / 64;
      const uint64_t dstbit = uint64_t{1} << (i % 64);
      const std::size_t dstw = i / 64;
      for (std::size_t c = 0; c < w; ++c)
        if (packed[c][srcw] & srcbit) res[c][dstw] |= dstbit;
    }

    std::vector<uint32_t> marg(w);
    bool ok = true;
    for (std::size_t c = 0; c < w && ok; ++c) {
      uint32_t cnt = 0;
      for (uint64_t word : res[c]) cnt += static_cast<uint32_t>(std::popcount(word));
      marg[c] = cnt;
      ok = cnt > 0 && cnt < m;
    }
    if (!ok) continue;

    // the pairwise condition P(i|j) < 1 or P(j|i) < 1 fails exactly when two
    // columns mark the same rows, i.e. count(a) == count(b) == count(a and b)
    std::vector<uint32_t> joint(w * (w - 1) / 2);
    std::size_t p = 0;
    for (std::size_t a = 0; a < w && ok; ++a)
      for (std::size_t b = a + 1; b < w; ++b, ++p) {
        uint32_t cnt = 0;
        for (std::size_t t = 0; t < words; ++t)
          cnt += static_cast<uint32_t>(std::popcount(res[a][t] & res[b][t]));
        joint[p] = cnt;
        if (cnt == marg[a] && cnt == marg[b]) {
          ok = false;
          break;
        }
      }
    if (!ok) continue;

    out.push(std::move(marg), std::move(joint));
  }
  out.set_attempts(attempts);
  if (out.accepted() < k_min)
    throw DataError("degenerate data: only " + std::to_string(out.accepted()) + " of " +
                    std::to_string(k_min) + " resamples accepted after " +
                    std::to_string(attempts) + " attempts");
  return out;
}

bool PrimaFacieGraph::has_edge(std::size_t from, std::size_t to) const {
  for (const auto& e : edges)
    if (e.from == from && e.to == to) return true;
  return false;
}

std::vector<std::vector<std::size_t>> PrimaFacieGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(cols);
  for (const auto& e : edges) adj[e.from].push_back(e.to);
  return adj;
}

bool PrimaFacieGraph::is_acyclic() const {
  auto adj = adjacency();
  std::vector<int> state(cols, 0);  // 0 new, 1 open, 2 done
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < cols; ++s) {
    if (state[s]) continue;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      if (state[v] == 0) {
        state[v] = 1;
        for (std::size_t u : adj[v]) {
          if (state[u] == 1) return false;
          if (state[u] == 0) stack.push_back(u);
        }
      } else {
        if (state[v] == 1) state[v] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

PrimaFacieGraph prima_facie_graph(const LiftedMatrix& lm, const BootstrapDistributions& dists,
                                  double alpha, std::size_t min_boot) {
  if (dists.cols() != lm.cols() || dists.rows() != lm.rows())
    throw DataError("bootstrap distributions do not match the lifted matrix");
  if (dists.accepted() < min_boot)
    throw DataError("degenerate data: fewer than " + std::to_string(min_boot) +
                    " accepted resamples");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha outside [0,1]");

  const std::size_t w = lm.cols(), m = lm.rows();
  PrimaFacieGraph g;
  g.cols = w;
  for (std::size_t c = 0; c < w; ++c) {
    g.names.push_back(lm.col_name(c));
    g.is_clause.push_back(lm.is_clause_col(c));
  }

  std::vector<int64_t> cnt(w);
  for (std::size_t c = 0; c < w; ++c) cnt[c] = static_cast<int64_t>(lm.count(c));

  for (std::size_t i = 0; i < w; ++i) {
    std::vector<EventId> targets;
    if (lm.is_clause_col(i)) targets = lm.clause_targets(i);

    for (std::size_t j = 0; j < w; ++j) {
      if (i == j || lm.is_clause_col(j)) continue;
      if (lm.is_clause_col(i) &&
          std::find(targets.begin(), targets.end(), EventId{j}) == targets.end())
        continue;

      // point estimates, exact integer comparisons
      const int64_t ci = cnt[i], cj = cnt[j];
      const int64_t cij = static_cast<int64_t>(lm.count_joint(i, j));
      if (ci <= cj) continue;                              // temporal priority
      if (ci == 0 || ci == static_cast<int64_t>(m)) continue;
      // P(j|i) > P(j|not i)  <=>  cij*(m-ci) > ci*(cj-cij)
      if (cij * (static_cast<int64_t>(m) - ci) <= ci * (cj - cij)) continue;

      PfEdge e;
      e.from = i;
      e.to = j;
      e.gamma = static_cast<double>(ci - cj) / static_cast<double>(m);
      e.lambda_pr = static_cast<double>(cij) / static_cast<double>(ci) -
                    static_cast<double>(cj - cij) / static_cast<double>(m - ci);
      e.p_tp = mann_whitney_greater(dists.marginals(i), dists.marginals(j));
      if (e.p_tp >= alpha) continue;
      e.p_pr = mann_whitney_greater(dists.conditionals(j, i), dists.conditionals_negated(j, i));
      if (e.p_pr >= alpha) continue;
      g.edges.push_back(e);
    }
  }
  return g;
}

namespace {

// does `to` reach `from` following current edges? then (from,to) closes a cycle
bool on_cycle(const PrimaFacieGraph& g, const PfEdge& e) {
  auto adj = g.adjacency();
  std::vector<bool> seen(g.cols, false);
  std::vector<std::size_t> stack{e.to};
  seen[e.to] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (v == e.from) return true;
    for (std::size_t u : adj[v])
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
  }
  return false;
}

}  // namespace

PrimaFacieGraph remove_cycles(PrimaFacieGraph g) {
  while (!g.is_acyclic()) {
    std::size_t worst = SIZE_MAX;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      if (!on_cycle(g, g.edges[k])) continue;
      if (worst == SIZE_MAX) {
        worst = k;
        continue;
      }
      const PfEdge &a = g.edges[k], &b = g.edges[worst];
      const double pa = std::max(a.p_tp, a.p_pr), pb = std::max(b.p_tp, b.p_pr);
      bool beats = pa > pb;
      if (pa == pb) {
        beats = a.lambda_pr < b.lambda_pr;
        if (a.lambda_pr == b.lambda_pr)
          beats = std::pair(g.names[a.from], g.names[a.to]) <
                  std::pair(g.names[b.from], g.names[b.to]);
      }
      if (beats) worst = k;
    }
    g.edges.erase(g.edges.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  return g;
}

}  // namespace progmod
