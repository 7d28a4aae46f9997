#include "progmod/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "progmod/errors.hpp"
#include "progmod/rng.hpp"

namespace progmod {

std::string topology_kind_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::tree: return "tree";
    case TopologyKind::forest: return "forest";
    case TopologyKind::connected_dag: return "connected-dag";
    case TopologyKind::disconnected_dag: return "disconnected-dag";
  }
  return "tree";
}

TopologyKind topology_kind_from_name(const std::string& name) {
  if (name == "tree") return TopologyKind::tree;
  if (name == "forest") return TopologyKind::forest;
  if (name == "connected-dag") return TopologyKind::connected_dag;
  if (name == "disconnected-dag") return TopologyKind::disconnected_dag;
  throw DataError("unknown topology kind " + name);
}

std::vector<std::pair<std::size_t, std::size_t>> GroundTruth::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    for (std::size_t p : nodes[j].parents) out.push_back({p, j});
  return out;
}

bool GroundTruth::is_forest() const {
  for (const auto& n : nodes)
    if (n.parents.size() > 1) return false;
  return true;
}

namespace {

std::size_t level_cap(std::size_t n) {
  // ceil(log2 n), floored at 2; 1 is the root, children live on [2, cap]
  std::size_t cap = 0, pow = 1;
  while (pow < n) {
    pow *= 2;
    ++cap;
  }
  return std::max<std::size_t>(2, cap);
}

// appends one component of n_events nodes; node ids start at base
void grow_component(GroundTruth& gt, std::size_t base, std::size_t n_events,
                    const TopologySpec& spec, Rng& rng) {
  const bool dag =
      spec.kind == TopologyKind::connected_dag || spec.kind == TopologyKind::disconnected_dag;
  const std::size_t cap = level_cap(n_events);
  const std::size_t q = n_events - 1;
  if (q < cap - 1)
    throw DataError("n too small to populate all levels (" + std::to_string(n_events) +
                    " events, " + std::to_string(cap) + " levels)");

  // uniform level draw, redrawn until no level in [2, cap] is empty
  std::vector<std::size_t> levels(q);
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 100000) throw DataError("level assignment did not converge");
    std::vector<bool> used(cap + 1, false);
    for (auto& l : levels) {
      l = 2 + rng.below(cap - 1);
      used[l] = true;
    }
    bool ok = true;
    for (std::size_t l = 2; l <= cap; ++l) ok = ok && used[l];
    if (ok) break;
  }
  std::sort(levels.begin(), levels.end());

  auto& nodes = gt.nodes;
  nodes[base].level = 1;
  nodes[base].fire_prob = rng.uniform(spec.p_min, spec.p_max);
  nodes[base].marginal = nodes[base].fire_prob;

  std::vector<std::vector<std::size_t>> by_level(cap + 1);
  by_level[1].push_back(base);
  for (std::size_t i = 0; i < q; ++i) {
    const std::size_t id = base + 1 + i;
    nodes[id].level = levels[i];
    by_level[levels[i]].push_back(id);
  }

  for (std::size_t i = 0; i < q; ++i) {
    const std::size_t id = base + 1 + i;
    const auto& prev = by_level[nodes[id].level - 1];
    std::size_t k = 1;
    if (dag) k = std::min<std::size_t>(1 + rng.below(spec.max_parents), prev.size());
    auto picks = rng.sample_without_replacement(prev.size(), k);
    for (std::size_t p : picks) nodes[id].parents.push_back(prev[p]);
    std::sort(nodes[id].parents.begin(), nodes[id].parents.end());

    nodes[id].fire_prob = rng.uniform(spec.p_min, spec.p_max);
    double prod = 1.0;
    for (std::size_t p : nodes[id].parents) prod *= nodes[p].marginal;
    nodes[id].marginal = nodes[id].fire_prob * prod;
  }
}

}  // namespace

GroundTruth random_topology(const TopologySpec& spec) {
  if (spec.n_events < 2) throw DataError("need at least two events");
  if (!(spec.p_min > 0.0 && spec.p_min <= spec.p_max && spec.p_max < 1.0))
    throw DataError("probability bounds must satisfy 0 < p_min <= p_max < 1");
  if (spec.max_parents < 1) throw DataError("max_parents must be positive");
  const bool multi =
      spec.kind == TopologyKind::forest || spec.kind == TopologyKind::disconnected_dag;
  const std::size_t comps = multi ? spec.components : 1;
  if (comps < 1) throw DataError("components must be positive");
  if (2 * comps > spec.n_events)
    throw DataError("each component needs at least two events");

  Rng rng(spec.seed);

  // uniform composition of n_events into comps parts, parts of at least two
  std::vector<std::size_t> sizes;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 100000) throw DataError("component split did not converge");
    sizes.clear();
    if (comps == 1) {
      sizes.push_back(spec.n_events);
    } else {
      auto cuts = rng.sample_without_replacement(spec.n_events - 1, comps - 1);
      std::size_t prev = 0;
      for (std::size_t c : cuts) {
        sizes.push_back(c + 1 - prev);
        prev = c + 1;
      }
      sizes.push_back(spec.n_events - prev);
    }
    if (std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s >= 2; })) break;
  }

  GroundTruth gt;
  gt.kind = spec.kind;
  gt.disjunctive = spec.disjunctive &&
                   (spec.kind == TopologyKind::connected_dag ||
                    spec.kind == TopologyKind::disconnected_dag);
  gt.seed = spec.seed;
  gt.nodes.resize(spec.n_events);
  for (std::size_t i = 0; i < spec.n_events; ++i) gt.nodes[i].label = "e" + std::to_string(i + 1);

  std::size_t base = 0;
  for (std::size_t s : sizes) {
    grow_component(gt, base, s, spec, rng);
    base += s;
  }
  return gt;
}

namespace {

bool gate_holds(const GroundTruth& gt, const GroundTruthNode& node,
                const std::vector<uint8_t>& fired, Rng& rng) {
  if (node.parents.empty()) return true;
  if (!gt.disjunctive || node.parents.size() == 1) {
    for (std::size_t p : node.parents)
      if (!fired[p]) return false;
    return true;
  }
  // draw a nonempty required subset; the draw happens for every row so the
  // stream stays aligned regardless of parent states
  const std::size_t nsub = (std::size_t{1} << node.parents.size()) - 1;
  std::size_t mask;
  if (node.subset_weights.empty()) {
    mask = 1 + rng.below(nsub);
  } else {
    if (node.subset_weights.size() != nsub)
      throw DataError("subset weights do not match the parent count");
    double total = 0.0;
    for (double wgt : node.subset_weights) total += wgt;
    double u = rng.uniform01() * total;
    mask = nsub;
    for (std::size_t s = 1; s <= nsub; ++s) {
      u -= node.subset_weights[s - 1];
      if (u < 0.0) {
        mask = s;
        break;
      }
    }
  }
  for (std::size_t b = 0; b < node.parents.size(); ++b)
    if ((mask >> b) & 1 && !fired[node.parents[b]]) return false;
  return true;
}

}  // namespace

GenotypeMatrix sample_dataset(const GroundTruth& gt, std::size_t m_rows, uint64_t seed) {
  if (m_rows == 0) throw DataError("need at least one row");
  const std::size_t n = gt.nodes.size();

  std::vector<std::string> samples(m_rows);
  // labels may carry an explicit "kind:label" prefix (models converted from
  // fitted trees do); plain labels default to kind "event"
  std::vector<EventMeta> events(n);
  for (std::size_t i = 0; i < n; ++i) events[i] = parse_event_name(gt.nodes[i].label);

  std::vector<uint8_t> bits(m_rows * n, 0);
  std::vector<uint8_t> fired(n);
  for (std::size_t r = 0; r < m_rows; ++r) {
    samples[r] = "s" + std::to_string(r + 1);
    Rng rng(derive_seed(seed, r));
    std::fill(fired.begin(), fired.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& node = gt.nodes[i];
      if (gate_holds(gt, node, fired, rng) && rng.bernoulli(node.fire_prob)) fired[i] = 1;
    }
    std::copy(fired.begin(), fired.end(), bits.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  return GenotypeMatrix(std::move(samples), std::move(events), std::move(bits));
}

GenotypeMatrix apply_noise(const GenotypeMatrix& m, double nu, uint64_t seed) {
  if (nu < 0.0 || nu > 1.0) throw std::invalid_argument("nu outside [0,1]");
  GenotypeMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Rng rng(derive_seed(seed, r));
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (rng.bernoulli(nu)) out.set(r, EventId{c}, rng.bernoulli(0.5));
  }
  return out;
}

GenotypeMatrix apply_asymmetric_noise(const GenotypeMatrix& m, double eps_plus, double eps_minus,
                                      uint64_t seed) {
  if (eps_plus < 0.0 || eps_plus >= 1.0 || eps_minus < 0.0 || eps_minus >= 1.0 ||
      eps_plus + eps_minus >= 1.0)
    throw std::invalid_argument("noise rates must be nonnegative and sum below one");
  GenotypeMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Rng rng(derive_seed(seed, r));
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const bool v = m.at(r, EventId{c});
      const double u = rng.uniform01();
      if (v ? u < eps_minus : u < eps_plus) out.set(r, EventId{c}, !v);
    }
  }
  return out;
}

GenotypeMatrix sample_exclusive_branches(std::size_t m_rows, double p_first, double branch_prob,
                                         double child_prob, uint64_t seed) {
  if (m_rows == 0) throw DataError("need at least one row");
  std::vector<std::string> samples(m_rows);
  std::vector<EventMeta> events = {EventMeta{"a", "event"}, EventMeta{"b", "event"},
                                   EventMeta{"c", "event"}};
  std::vector<uint8_t> bits(m_rows * 3, 0);
  for (std::size_t r = 0; r < m_rows; ++r) {
    samples[r] = "s" + std::to_string(r + 1);
    Rng rng(derive_seed(seed, r));
    const std::size_t branch = rng.bernoulli(p_first) ? 0 : 1;
    const bool on = rng.bernoulli(branch_prob);
    if (on) bits[r * 3 + branch] = 1;
    if (on && rng.bernoulli(child_prob)) bits[r * 3 + 2] = 1;
  }
  return GenotypeMatrix(std::move(samples), std::move(events), std::move(bits));
}

}  // namespace progmod
