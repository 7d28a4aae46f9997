#include "progmod/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "progmod/errors.hpp"
#include "progmod/rng.hpp"

namespace progmod {

namespace {

constexpr const char* kRoot = "<root>";

using EdgeSet = std::set<std::pair<std::string, std::string>>;

std::string gt_node_name(const GroundTruthNode& n) { return parse_event_name(n.label).name(); }

EdgeSet tree_edges(const TreeModel& t, const GenotypeMatrix& m) {
  EdgeSet out;
  for (std::size_t j = 0; j < t.parent.size(); ++j) {
    std::string to = m.event(EventId{j}).name();
    if (t.parent[j])
      out.insert({m.event(*t.parent[j]).name(), std::move(to)});
    else
      out.insert({kRoot, std::move(to)});
  }
  return out;
}

EdgeSet progression_edges(const ProgressionModel& pm) {
  EdgeSet out;
  for (const auto& e : pm.edges) out.insert({pm.names[e.from], pm.names[e.to]});
  return out;
}

EdgeSet gt_edge_set(const GroundTruth& gt, bool with_root) {
  EdgeSet out;
  for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
    if (gt.nodes[j].parents.empty()) {
      if (with_root) out.insert({kRoot, gt_node_name(gt.nodes[j])});
      continue;
    }
    for (std::size_t p : gt.nodes[j].parents)
      out.insert({gt_node_name(gt.nodes[p]), gt_node_name(gt.nodes[j])});
  }
  return out;
}

struct Tally {
  BootstrapReport rep;
  EdgeSet reference;
  std::map<std::pair<std::string, std::string>, std::size_t> edge_hits;
  std::size_t model_hits = 0;

  void record(const EdgeSet& inferred) {
    for (const auto& e : inferred) ++edge_hits[e];
    if (inferred == reference) ++model_hits;
  }

  BootstrapReport finish(std::size_t nboot) {
    rep.nboot = nboot;
    const double denom = static_cast<double>(nboot);
    rep.model_freq = static_cast<double>(model_hits) / denom;
    for (const auto& [e, hits] : edge_hits)
      rep.edge_freq[e.first + " -> " + e.second] = static_cast<double>(hits) / denom;
    for (const auto& e : reference) {
      const std::string key = e.first + " -> " + e.second;
      rep.reference_edges[key] = rep.edge_freq.count(key) ? rep.edge_freq[key] : 0.0;
    }
    return rep;
  }
};

// runs the configured algorithm; one (regularizer, edge set) pair per model
std::vector<std::pair<std::string, EdgeSet>> run_algo(const GenotypeMatrix& m,
                                                      const AlgoConfig& algo, uint64_t seed) {
  std::vector<std::pair<std::string, EdgeSet>> out;
  if (algo.kind == AlgoConfig::Kind::caprese) {
    TreeModel t = reconstruct_tree(m, algo.lambda);
    out.push_back({"none", tree_edges(t, m)});
  } else {
    CapriParams params = algo.capri;
    params.seed = seed;
    CapriResult res = reconstruct(m, algo.hypotheses, params);
    for (const auto& model : res.models)
      out.push_back({regularizer_name(model.reg), progression_edges(model)});
  }
  return out;
}

std::vector<BootstrapReport> tally_reports(const std::string& kind, const GenotypeMatrix& base,
                                           const AlgoConfig& algo, std::size_t nboot,
                                           uint64_t seed, const EdgeSet* fixed_reference,
                                           bool resample_rows) {
  if (nboot == 0) throw std::invalid_argument("nboot must be positive");

  // reference fits on the input data unless the caller supplies one
  std::vector<Tally> tallies;
  if (fixed_reference) {
    Tally t;
    t.rep.kind = kind;
    t.rep.regularizer = algo.kind == AlgoConfig::Kind::caprese ? "none" : "";
    t.reference = *fixed_reference;
    if (algo.kind == AlgoConfig::Kind::caprese) {
      tallies.push_back(t);
    } else {
      for (Regularizer reg : algo.capri.regs) {
        t.rep.regularizer = regularizer_name(reg);
        tallies.push_back(t);
      }
    }
  } else {
    for (auto& [reg, edges] : run_algo(base, algo, algo.capri.seed)) {
      Tally t;
      t.rep.kind = kind;
      t.rep.regularizer = reg;
      t.reference = std::move(edges);
      tallies.push_back(std::move(t));
    }
  }

  for (std::size_t iter = 0; iter < nboot; ++iter) {
    const uint64_t stream = derive_seed(seed, iter);
    GenotypeMatrix replicate = base;
    if (resample_rows) {
      Rng rng(stream);
      std::vector<std::size_t> idx(base.rows());
      for (auto& i : idx) i = rng.below(base.rows());
      replicate = base.take_rows(idx);
    }
    try {
      auto fits = run_algo(replicate, algo, resample_rows ? derive_seed(stream, 1) : stream);
      for (std::size_t k = 0; k < tallies.size(); ++k) tallies[k].record(fits[k].second);
    } catch (const DataError&) {
      for (auto& t : tallies) ++t.rep.skipped;
    }
  }

  std::vector<BootstrapReport> out;
  out.reserve(tallies.size());
  for (auto& t : tallies) out.push_back(t.finish(nboot));
  return out;
}

}  // namespace

std::vector<BootstrapReport> nonparametric_bootstrap(const GenotypeMatrix& m,
                                                     const AlgoConfig& algo, std::size_t nboot,
                                                     uint64_t seed) {
  return tally_reports("nonparametric", m, algo, nboot, seed, nullptr, true);
}

std::vector<BootstrapReport> statistical_bootstrap(const GenotypeMatrix& m,
                                                   const CapriParams& params,
                                                   const std::vector<Hypothesis>& hyps,
                                                   std::size_t nboot, uint64_t seed) {
  AlgoConfig algo;
  algo.kind = AlgoConfig::Kind::capri;
  algo.capri = params;
  algo.hypotheses = hyps;
  return tally_reports("statistical", m, algo, nboot, seed, nullptr, false);
}

std::vector<BootstrapReport> parametric_bootstrap(const GroundTruth& gt, std::size_t m_rows,
                                                  double eps_plus, double eps_minus,
                                                  const AlgoConfig& algo, std::size_t nboot,
                                                  uint64_t seed) {
  if (nboot == 0) throw std::invalid_argument("nboot must be positive");
  if (eps_plus < 0.0 || eps_plus >= 1.0 || eps_minus < 0.0 || eps_minus >= 1.0 ||
      eps_plus + eps_minus >= 1.0)
    throw std::invalid_argument("noise rates must be nonnegative and sum below one");

  const EdgeSet reference = gt_edge_set(gt, algo.kind == AlgoConfig::Kind::caprese);

  std::vector<Tally> tallies;
  {
    Tally t;
    t.rep.kind = "parametric";
    t.reference = reference;
    if (algo.kind == AlgoConfig::Kind::caprese) {
      t.rep.regularizer = "none";
      tallies.push_back(t);
    } else {
      for (Regularizer reg : algo.capri.regs) {
        t.rep.regularizer = regularizer_name(reg);
        tallies.push_back(t);
      }
    }
  }

  for (std::size_t iter = 0; iter < nboot; ++iter) {
    const uint64_t stream = derive_seed(seed, iter);
    try {
      GenotypeMatrix data = sample_dataset(gt, m_rows, stream);
      if (eps_plus > 0.0 || eps_minus > 0.0)
        data = apply_asymmetric_noise(data, eps_plus, eps_minus, derive_seed(stream, 1));
      auto fits = run_algo(data, algo, derive_seed(stream, 2));
      for (std::size_t k = 0; k < tallies.size(); ++k) tallies[k].record(fits[k].second);
    } catch (const DataError&) {
      for (auto& t : tallies) ++t.rep.skipped;
    }
  }

  std::vector<BootstrapReport> out;
  out.reserve(tallies.size());
  for (auto& t : tallies) out.push_back(t.finish(nboot));
  return out;
}

GroundTruth ground_truth_from_tree(const TreeModel& tree, const GenotypeMatrix& m) {
  const std::size_t n = tree.parent.size();
  if (n != m.cols()) throw std::invalid_argument("tree does not match the matrix");

  // depth-sort so parents precede children
  std::vector<std::size_t> depth(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t d = 0, v = j;
    while (tree.parent[v]) {
      v = tree.parent[v]->value;
      if (++d > n) throw DataError("parent pointers contain a cycle");
    }
    depth[j] = d;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

  GroundTruth gt;
  gt.kind = TopologyKind::forest;
  gt.seed = 0;
  gt.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = order[i];
    auto& node = gt.nodes[i];
    node.label = m.event(EventId{j}).name();
    node.level = depth[j] + 1;
    if (tree.parent[j]) node.parents.push_back(pos[tree.parent[j]->value]);
    node.fire_prob = tree.labeling[j];
    node.marginal = node.parents.empty()
                        ? node.fire_prob
                        : node.fire_prob * gt.nodes[node.parents[0]].marginal;
  }
  return gt;
}

GroundTruth ground_truth_from_progression(const ProgressionModel& pm) {
  const std::size_t n = pm.names.size();
  for (bool c : pm.is_clause)
    if (c) throw DataError("pattern nodes cannot be sampled as plain events");

  // longest-path depth; the structure is acyclic by construction
  std::vector<std::size_t> depth(n, 0);
  bool changed = true;
  std::size_t rounds = 0;
  while (changed) {
    if (++rounds > n + 1) throw DataError("parent sets contain a cycle");
    changed = false;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p : pm.parents[j])
        if (depth[j] < depth[p] + 1) {
          depth[j] = depth[p] + 1;
          changed = true;
        }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

  GroundTruth gt;
  gt.kind = TopologyKind::disconnected_dag;
  gt.seed = pm.seed;
  gt.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = order[i];
    auto& node = gt.nodes[i];
    node.label = pm.names[j];
    node.level = depth[j] + 1;
    for (std::size_t p : pm.parents[j]) node.parents.push_back(pos[p]);
    std::sort(node.parents.begin(), node.parents.end());
    node.fire_prob = pm.labeling[j];
    double prod = 1.0;
    for (std::size_t p : node.parents) prod *= gt.nodes[p].marginal;
    node.marginal = node.fire_prob * prod;
  }
  return gt;
}

double hypergeometric_upper_tail(std::size_t n_rows, std::size_t count_a, std::size_t count_b,
                                 std::size_t overlap) {
  if (count_a == 0 || count_a == n_rows || count_b == 0 || count_b == n_rows)
    throw DataError("degenerate event in overlap test");
  auto lchoose = [](std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
  };
  const std::size_t hi = std::min(count_a, count_b);
  const double base = lchoose(n_rows, count_a);
  double p = 0.0;
  for (std::size_t x = overlap; x <= hi; ++x) {
    if (count_a - x > n_rows - count_b) continue;  // impossible configuration
    p += std::exp(lchoose(count_b, x) + lchoose(n_rows - count_b, count_a - x) - base);
  }
  return std::min(p, 1.0);
}

double hypergeometric_overlap(const GenotypeMatrix& m, EventId a, EventId b) {
  return hypergeometric_upper_tail(m.rows(), m.count(a), m.count(b), m.count_joint(a, b));
}

}  // namespace progmod
