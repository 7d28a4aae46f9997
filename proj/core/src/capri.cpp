#include "progmod/capri.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "progmod/confidence.hpp"
#include "progmod/errors.hpp"
#include "progmod/rng.hpp"

namespace progmod {

std::string regularizer_name(Regularizer r) {
  return r == Regularizer::bic ? "bic" : "aic";
}

Regularizer regularizer_from_name(const std::string& name) {
  if (name == "bic") return Regularizer::bic;
  if (name == "aic") return Regularizer::aic;
  throw DataError("unknown regularizer " + name);
}

double node_log_likelihood(const LiftedMatrix& data, std::size_t j,
                           const std::vector<std::size_t>& parents) {
  const std::size_t m = data.rows();
  if (parents.size() > 62) throw std::invalid_argument("parent set too large");

  // (ones, zeros) per observed parent configuration
  std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> cells;
  cells.reserve(std::min<std::size_t>(m, std::size_t{1} << parents.size()));
  for (std::size_t r = 0; r < m; ++r) {
    uint64_t cfg = 0;
    for (std::size_t b = 0; b < parents.size(); ++b)
      if (data.at(r, parents[b])) cfg |= uint64_t{1} << b;
    auto& cell = cells[cfg];
    if (data.at(r, j))
      ++cell.first;
    else
      ++cell.second;
  }

  double ll = 0.0;
  for (const auto& [cfg, cell] : cells) {
    const double n1 = static_cast<double>(cell.first), n0 = static_cast<double>(cell.second);
    const double denom = n1 + n0 + 2.0;
    if (n1 > 0) ll += n1 * std::log((n1 + 1.0) / denom);
    if (n0 > 0) ll += n0 * std::log((n0 + 1.0) / denom);
  }
  return ll;
}

double log_likelihood(const LiftedMatrix& data, const Structure& parents) {
  if (parents.size() != data.cols())
    throw std::invalid_argument("structure does not match the data columns");
  double ll = 0.0;
  for (std::size_t j = 0; j < parents.size(); ++j) ll += node_log_likelihood(data, j, parents[j]);
  return ll;
}

uint64_t dimension(const Structure& parents, bool free_params) {
  uint64_t dim = 0;
  for (const auto& pi : parents) {
    if (pi.size() > 62) throw std::invalid_argument("parent set too large");
    dim += (uint64_t{1} << pi.size()) - (free_params ? 1 : 0);
  }
  return dim;
}

namespace {

double penalty_weight(const LiftedMatrix& data, Regularizer reg) {
  return reg == Regularizer::bic ? std::log(static_cast<double>(data.rows())) / 2.0 : 1.0;
}

bool creates_cycle(const Structure& parents, std::size_t from, std::size_t to) {
  // would from -> to close a cycle? walk up from "from" through parents
  std::vector<std::size_t> stack{from};
  std::vector<bool> seen(parents.size(), false);
  seen[from] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (std::size_t p : parents[v])
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
  }
  return false;
}

}  // namespace

double regularized_score(const LiftedMatrix& data, const Structure& parents,
                         const ScoreOptions& opts) {
  return log_likelihood(data, parents) -
         penalty_weight(data, opts.reg) *
             static_cast<double>(dimension(parents, opts.free_params_dim));
}

HillClimbResult hill_climb(const PrimaFacieGraph& space, const LiftedMatrix& data,
                           const ScoreOptions& opts, std::size_t max_iter, std::size_t restarts,
                           uint64_t seed, bool require_acyclic_space) {
  if (space.cols != data.cols())
    throw std::invalid_argument("search space does not match the data columns");
  if (restarts == 0) throw std::invalid_argument("restarts must be positive");
  const bool space_acyclic = space.is_acyclic();
  if (require_acyclic_space && !space_acyclic)
    throw std::invalid_argument("search space contains a cycle");

  const std::size_t w = data.cols();
  const std::size_t nmoves = space.edges.size();
  const double pen = penalty_weight(data, opts.reg);

  std::vector<double> empty_local(w);
  for (std::size_t j = 0; j < w; ++j) empty_local[j] = node_log_likelihood(data, j, {});

  HillClimbResult best;
  bool have_best = false;

  for (std::size_t rs = 0; rs < restarts; ++rs) {
    Rng rng(derive_seed(seed, rs));
    Structure parents(w);
    std::vector<double> local = empty_local;

    // the first restart reproduces the single-run walk from the empty set;
    // later ones start from a random acyclic subset, since order variation
    // alone cannot escape optima trapped behind pairwise interactions
    if (rs > 0 && max_iter > 0) {
      std::vector<std::size_t> order(nmoves);
      for (std::size_t k = 0; k < nmoves; ++k) order[k] = k;
      rng.shuffle(order);
      for (std::size_t mv : order) {
        if (!rng.bernoulli(0.5)) continue;
        const std::size_t from = space.edges[mv].from, to = space.edges[mv].to;
        auto& pi = parents[to];
        auto pos = std::lower_bound(pi.begin(), pi.end(), from);
        if (pos != pi.end() && *pos == from) continue;
        if (!space_acyclic && creates_cycle(parents, from, to)) continue;
        pi.insert(pos, from);
      }
      for (std::size_t j = 0; j < w; ++j)
        if (!parents[j].empty()) local[j] = node_log_likelihood(data, j, parents[j]);
    }

    std::vector<bool> rejected(nmoves, false);
    std::size_t nrejected = 0;

    for (std::size_t iter = 0; iter < max_iter && nrejected < nmoves; ++iter) {
      if (nmoves == 0) break;
      const std::size_t mv = rng.below(nmoves);
      if (rejected[mv]) continue;
      const std::size_t from = space.edges[mv].from, to = space.edges[mv].to;

      auto& pi = parents[to];
      auto pos = std::lower_bound(pi.begin(), pi.end(), from);
      const bool removing = pos != pi.end() && *pos == from;

      if (!removing && !space_acyclic && creates_cycle(parents, from, to)) {
        rejected[mv] = true;
        ++nrejected;
        continue;
      }

      std::vector<std::size_t> trial = pi;
      if (removing)
        trial.erase(std::lower_bound(trial.begin(), trial.end(), from));
      else
        trial.insert(std::lower_bound(trial.begin(), trial.end(), from), from);

      const double trial_local = node_log_likelihood(data, to, trial);
      const double dim_old = static_cast<double>(uint64_t{1} << pi.size());
      const double dim_new = static_cast<double>(uint64_t{1} << trial.size());
      const double delta = trial_local - local[to] - pen * (dim_new - dim_old);

      if (delta > 0.0) {
        pi = std::move(trial);
        local[to] = trial_local;
        std::fill(rejected.begin(), rejected.end(), false);
        nrejected = 0;
      } else {
        rejected[mv] = true;
        ++nrejected;
      }
    }

    const double score = regularized_score(data, parents, opts);
    if (!have_best || score > best.score) {
      best = {std::move(parents), score};
      have_best = true;
    }
  }
  return best;
}

namespace {

double labeling_of(const LiftedMatrix& data, std::size_t j,
                   const std::vector<std::size_t>& parents) {
  const std::size_t m = data.rows();
  if (parents.empty()) return data.marginal(j);
  std::size_t denom = 0, num = 0;
  for (std::size_t r = 0; r < m; ++r) {
    bool all = true;
    for (std::size_t p : parents)
      if (!data.at(r, p)) {
        all = false;
        break;
      }
    if (!all) continue;
    ++denom;
    num += data.at(r, j);
  }
  // a never-observed parent combination labels the node zero
  return denom == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(denom);
}

}  // namespace

CapriResult reconstruct(const GenotypeMatrix& m, const std::vector<Hypothesis>& hyps,
                        const CapriParams& params) {
  if (params.regs.empty()) throw std::invalid_argument("no regularizer requested");
  const LiftedMatrix lm = lift(m, hyps);

  const uint64_t boot_seed = derive_seed(params.seed, 1);
  const uint64_t climb_seed = derive_seed(params.seed, 2);

  const BootstrapDistributions dists =
      bootstrap_distributions(lm, params.nboot, boot_seed, params.max_attempts);
  PrimaFacieGraph pf =
      remove_cycles(prima_facie_graph(lm, dists, params.alpha, params.min_boot));

  CapriResult out;
  out.boot_accepted = dists.accepted();
  out.boot_attempts = dists.attempts();

  for (Regularizer reg : params.regs) {
    ScoreOptions opts{reg, params.free_params_dim};
    HillClimbResult hc =
        hill_climb(pf, lm, opts, params.max_iter, params.restarts, climb_seed);

    ProgressionModel model;
    model.reg = reg;
    model.score = hc.score;
    model.seed = params.seed;
    model.parents = hc.parents;
    for (std::size_t c = 0; c < lm.cols(); ++c) {
      model.names.push_back(lm.col_name(c));
      model.kinds.push_back(lm.is_clause_col(c) ? "pattern"
                                                : lm.base().event(EventId{c}).kind);
      model.is_clause.push_back(lm.is_clause_col(c));
      model.labeling.push_back(labeling_of(lm, c, hc.parents[c]));
    }
    for (std::size_t to = 0; to < hc.parents.size(); ++to)
      for (std::size_t from : hc.parents[to]) {
        ModelEdge e;
        e.from = from;
        e.to = to;
        for (const auto& pe : pf.edges)
          if (pe.from == from && pe.to == to) {
            e.lambda_pr = pe.lambda_pr;
            e.p_tp = pe.p_tp;
            e.p_pr = pe.p_pr;
            break;
          }
        e.hyper_p = hypergeometric_upper_tail(lm.rows(), lm.count(from), lm.count(to),
                                              lm.count_joint(from, to));
        model.edges.push_back(e);
      }
    out.models.push_back(std::move(model));
  }
  out.pf = std::move(pf);
  return out;
}

}  // namespace progmod
