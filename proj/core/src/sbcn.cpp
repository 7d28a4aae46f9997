#include "progmod/sbcn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "progmod/errors.hpp"
#include "progmod/rng.hpp"

namespace progmod {

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CategoricalTable import_table(std::istream& in, char delim) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty table");
  auto header = split_line(line, delim);
  if (header.size() < 2) throw DataError("empty table: header has no attribute columns");

  CategoricalTable t;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto name = strip(header[i]);
    if (name.empty())
      throw DataError("empty attribute name in header column " + std::to_string(i));
    if (!seen.insert(name).second) throw DataError("duplicate attribute " + name);
    t.attributes.push_back(name);
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto cells = split_line(line, delim);
    if (cells.size() != header.size())
      throw DataError("ragged row at line " + std::to_string(lineno));
    t.samples.push_back(strip(cells[0]));
    std::vector<std::string> row;
    row.reserve(cells.size() - 1);
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(strip(cells[i]));
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw DataError("empty table: no record rows");
  return t;
}

void write_table(std::ostream& out, const CategoricalTable& t, char delim) {
  out << "sample";
  for (const auto& a : t.attributes) out << delim << a;
  out << "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << t.samples[r];
    for (const auto& v : t.rows[r]) out << delim << v;
    out << "\n";
  }
}

Binarized binarize(const CategoricalTable& t, const TemporalOrder& order) {
  for (const auto& a : t.attributes)
    if (!order.level.count(a)) throw DataError("temporal order misses attribute " + a);

  std::vector<std::vector<std::string>> values(t.attributes.size());
  for (std::size_t a = 0; a < t.attributes.size(); ++a) {
    std::set<std::string> vals;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& v = t.rows[r][a];
      if (v.empty())
        throw DataError("missing value for attribute " + t.attributes[a] + " in record " +
                        t.samples[r]);
      vals.insert(v);
    }
    values[a].assign(vals.begin(), vals.end());
  }

  std::vector<EventMeta> events;
  std::vector<std::size_t> level;
  for (std::size_t a = 0; a < t.attributes.size(); ++a)
    for (const auto& v : values[a]) {
      events.push_back(EventMeta{v, t.attributes[a]});
      level.push_back(order.level.at(t.attributes[a]));
    }

  std::vector<uint8_t> bits;
  bits.reserve(t.rows.size() * events.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t a = 0; a < t.attributes.size(); ++a)
      for (const auto& v : values[a]) bits.push_back(t.rows[r][a] == v ? 1 : 0);

  return Binarized{GenotypeMatrix(t.samples, std::move(events), std::move(bits)),
                   std::move(level)};
}

std::size_t Sbcn::find(const std::string& name) const {
  auto pos = name.find('=');
  if (pos == std::string::npos) pos = name.find(':');
  if (pos == std::string::npos)
    throw DataError("node must be written attribute=value: " + name);
  const std::string kind = name.substr(0, pos), label = name.substr(pos + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == kind && nodes[i].label == label) return i;
  throw DataError("unknown node " + name);
}

std::vector<std::vector<std::pair<std::size_t, double>>> Sbcn::out_adjacency() const {
  std::vector<std::vector<std::pair<std::size_t, double>>> out(nodes.size());
  for (const auto& e : edges) out[e.from].push_back({e.to, e.weight});
  for (auto& lst : out) std::sort(lst.begin(), lst.end());
  return out;
}

Sbcn learn_sbcn(const GenotypeMatrix& m, const std::vector<std::size_t>& level,
                const SbcnParams& params) {
  if (level.size() != m.cols())
    throw std::invalid_argument("stage list does not match the matrix columns");
  if (params.decision_neg.empty() || params.decision_pos.empty())
    throw DataError("no decision nodes designated");

  Sbcn s;
  s.nodes = m.events();
  s.level = level;
  s.reg = params.reg;
  s.seed = params.seed;
  s.decision_neg = s.find(params.decision_neg);
  s.decision_pos = s.find(params.decision_pos);
  if (s.decision_neg == s.decision_pos) throw DataError("decision nodes coincide");

  const auto rows = static_cast<std::int64_t>(m.rows());
  std::vector<std::int64_t> cnt(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    cnt[j] = static_cast<std::int64_t>(m.count(EventId{j}));

  PrimaFacieGraph space;
  space.cols = m.cols();
  space.is_clause.assign(m.cols(), false);
  for (std::size_t j = 0; j < m.cols(); ++j) space.names.push_back(m.event(EventId{j}).name());

  for (std::size_t v = 0; v < m.cols(); ++v) {
    if (cnt[v] == 0 || cnt[v] == rows) continue;  // conditioning side undefined
    for (std::size_t u = 0; u < m.cols(); ++u) {
      if (u == v || level[v] > level[u]) continue;
      const std::int64_t cu = cnt[u];
      const auto cvu = static_cast<std::int64_t>(m.count_joint(EventId{v}, EventId{u}));
      // P(u|v) > P(u|not v), cross-multiplied
      if (cvu * (rows - cnt[v]) <= (cu - cvu) * cnt[v]) continue;
      PfEdge e;
      e.from = v;
      e.to = u;
      e.gamma = static_cast<double>(cnt[v] - cu) / static_cast<double>(rows);
      e.lambda_pr = static_cast<double>(cvu) / static_cast<double>(cnt[v]) -
                    static_cast<double>(cu - cvu) / static_cast<double>(rows - cnt[v]);
      e.p_tp = e.p_pr = 0;
      space.edges.push_back(e);
    }
  }

  // same-level pairs can put both directions in the space; the search keeps
  // the model acyclic
  const LiftedMatrix data = lift(m, {});
  const ScoreOptions opts{params.reg, false};
  const HillClimbResult fit = hill_climb(space, data, opts, params.max_iter, params.restarts,
                                         params.seed, /*require_acyclic_space=*/false);
  s.score = fit.score;

  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (const auto& e : space.edges) weight[{e.from, e.to}] = e.lambda_pr;
  for (std::size_t u = 0; u < fit.parents.size(); ++u)
    for (std::size_t v : fit.parents[u]) s.edges.push_back({v, u, weight.at({v, u})});
  std::sort(s.edges.begin(), s.edges.end(), [](const SbcnEdge& a, const SbcnEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  return s;
}

namespace {

constexpr std::size_t kStepCap = 1000000;

struct WalkTally {
  std::size_t reached_neg = 0, reached_pos = 0;
  std::size_t steps_neg = 0, steps_pos = 0;
  std::size_t mediated_neg = 0;
};

WalkTally run_walks(const Sbcn& s, std::size_t v, const std::vector<std::size_t>& mediators,
                    std::size_t n_walks, uint64_t seed) {
  if (n_walks == 0) throw std::invalid_argument("need at least one walk");
  if (v >= s.nodes.size()) throw std::invalid_argument("walk source out of range");
  if (v == s.decision_neg || v == s.decision_pos)
    throw DataError("walk source is a decision node");
  for (std::size_t u : mediators) {
    if (u >= s.nodes.size()) throw std::invalid_argument("mediator out of range");
    if (u == v) throw DataError("mediator equals the walk source");
  }

  const auto out = s.out_adjacency();

  // some pole must be reachable or no walk can ever terminate
  {
    std::vector<bool> seen(s.nodes.size(), false);
    std::vector<std::size_t> stack{v};
    seen[v] = true;
    bool pole = false;
    while (!stack.empty() && !pole) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (const auto& [z, w] : out[x]) {
        if (z == s.decision_neg || z == s.decision_pos) {
          pole = true;
          break;
        }
        if (!seen[z]) {
          seen[z] = true;
          stack.push_back(z);
        }
      }
    }
    if (!pole)
      throw DataError("disconnected group: no decision pole reachable from " + s.node_name(v));
  }

  std::vector<bool> is_mediator(s.nodes.size(), false);
  for (std::size_t u : mediators) is_mediator[u] = true;

  WalkTally tally;
  for (std::size_t i = 0; i < n_walks; ++i) {
    Rng rng(derive_seed(seed, i));
    std::size_t cur = v, steps = 0, total = 0;
    bool via = false;
    while (true) {
      if (out[cur].empty()) {
        // sink that is not a pole: the attempt is discarded
        if (total >= kStepCap) throw DataError("random walk exceeded the step cap");
        cur = v;
        steps = 0;
        via = false;
        continue;
      }
      double sum = 0;
      for (const auto& [z, w] : out[cur]) sum += w;
      double x = rng.uniform01() * sum;
      std::size_t next = out[cur].back().first;
      for (const auto& [z, w] : out[cur]) {
        if (x < w) {
          next = z;
          break;
        }
        x -= w;
      }
      ++steps;
      if (++total > kStepCap) throw DataError("random walk exceeded the step cap");
      if (is_mediator[next]) via = true;
      if (next == s.decision_neg) {
        ++tally.reached_neg;
        tally.steps_neg += steps;
        tally.mediated_neg += via ? 1 : 0;
        break;
      }
      if (next == s.decision_pos) {
        ++tally.reached_pos;
        tally.steps_pos += steps;
        break;
      }
      cur = next;
    }
  }
  return tally;
}

}  // namespace

WalkScores group_discrimination(const Sbcn& s, std::size_t v, std::size_t n_walks, uint64_t seed) {
  const WalkTally t = run_walks(s, v, {}, n_walks, seed);
  WalkScores ws;
  ws.reached_neg = t.reached_neg;
  ws.reached_pos = t.reached_pos;
  ws.ds_neg = static_cast<double>(t.reached_neg) / static_cast<double>(n_walks);
  if (t.reached_neg)
    ws.as_neg = static_cast<double>(t.steps_neg) / static_cast<double>(t.reached_neg);
  if (t.reached_pos)
    ws.as_pos = static_cast<double>(t.steps_pos) / static_cast<double>(t.reached_pos);
  return ws;
}

double explainable_fraction(const Sbcn& s, std::size_t v, const std::vector<std::size_t>& mediators,
                            std::size_t n_walks, uint64_t seed) {
  if (mediators.empty()) throw std::invalid_argument("need at least one mediator");
  const WalkTally t = run_walks(s, v, mediators, n_walks, seed);
  if (t.reached_neg == 0)
    throw DataError("no walk reached the negative decision from " + s.node_name(v));
  return static_cast<double>(t.mediated_neg) / static_cast<double>(t.reached_neg);
}

std::vector<double> personalized_pagerank(const Sbcn& s, const std::vector<std::size_t>& seeds,
                                          double damping) {
  if (seeds.empty()) throw std::invalid_argument("need at least one seed node");
  if (!(damping > 0.0) || !(damping < 1.0))
    throw std::invalid_argument("damping must lie in (0, 1)");
  const std::size_t n = s.nodes.size();

  std::vector<double> restart(n, 0);
  for (std::size_t x : seeds) {
    if (x >= n) throw std::invalid_argument("seed node out of range");
    restart[x] += 1.0 / static_cast<double>(seeds.size());
  }

  const auto out = s.out_adjacency();
  std::vector<double> wsum(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (const auto& [z, w] : out[x]) wsum[x] += w;

  std::vector<double> p = restart, q(n);
  for (std::size_t iter = 0; iter < 100000; ++iter) {
    double dangling = 0;
    for (std::size_t z = 0; z < n; ++z) q[z] = (1.0 - damping) * restart[z];
    for (std::size_t x = 0; x < n; ++x) {
      if (out[x].empty()) {
        dangling += p[x];
        continue;
      }
      for (const auto& [z, w] : out[x]) q[z] += damping * p[x] * w / wsum[x];
    }
    for (std::size_t z = 0; z < n; ++z) q[z] += damping * dangling * restart[z];

    double residual = 0;
    for (std::size_t z = 0; z < n; ++z) residual += std::abs(q[z] - p[z]);
    p.swap(q);
    if (residual < 1e-12) break;
  }
  return p;
}

double generalized_score(const Sbcn& s, const std::vector<std::size_t>& seeds, double damping) {
  const auto p = personalized_pagerank(s, seeds, damping);
  const double neg = p[s.decision_neg], pos = p[s.decision_pos];
  if (neg + pos == 0) throw DataError("decision poles carry no walk mass");
  return neg / (neg + pos);
}

}  // namespace progmod
