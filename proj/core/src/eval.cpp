#include "progmod/eval.hpp"

#include <algorithm>
#include <map>

#include "progmod/errors.hpp"

namespace progmod {

namespace {
constexpr const char* kRoot = "<root>";
}

ModelGraph graph_of(const TreeModel& t, const GenotypeMatrix& m) {
  ModelGraph g;
  g.nodes.insert(kRoot);
  for (std::size_t j = 0; j < t.parent.size(); ++j) {
    const std::string name = m.event(EventId{j}).name();
    g.nodes.insert(name);
    g.edges.insert({t.parent[j] ? m.event(*t.parent[j]).name() : kRoot, name});
  }
  return g;
}

ModelGraph graph_of(const ProgressionModel& pm) {
  ModelGraph g;
  for (const auto& n : pm.names) g.nodes.insert(n);
  for (const auto& e : pm.edges) g.edges.insert({pm.names[e.from], pm.names[e.to]});
  return g;
}

ModelGraph graph_of(const GroundTruth& gt, bool with_root) {
  ModelGraph g;
  if (with_root) g.nodes.insert(kRoot);
  std::vector<std::string> names;
  for (const auto& n : gt.nodes) {
    names.push_back(parse_event_name(n.label).name());
    g.nodes.insert(names.back());
  }
  for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
    if (gt.nodes[j].parents.empty()) {
      if (with_root) g.edges.insert({kRoot, names[j]});
      continue;
    }
    for (std::size_t p : gt.nodes[j].parents) g.edges.insert({names[p], names[j]});
  }
  return g;
}

std::size_t hamming_distance(const ModelGraph& a, const ModelGraph& b) {
  if (a.nodes != b.nodes) throw DataError("node universes differ");
  std::size_t d = 0;
  for (const auto& e : a.edges) d += !b.edges.count(e);
  for (const auto& e : b.edges) d += !a.edges.count(e);
  return d;
}

PrecisionRecall precision_recall(const ModelGraph& inferred, const ModelGraph& truth) {
  PrecisionRecall pr;
  for (const auto& e : inferred.edges)
    truth.edges.count(e) ? ++pr.tp : ++pr.fp;
  for (const auto& e : truth.edges) pr.fn += !inferred.edges.count(e);
  pr.precision = pr.tp + pr.fp > 0
                     ? static_cast<double>(pr.tp) / static_cast<double>(pr.tp + pr.fp)
                     : (truth.edges.empty() ? 1.0 : 0.0);
  pr.recall = pr.tp + pr.fn > 0 ? static_cast<double>(pr.tp) / static_cast<double>(pr.tp + pr.fn)
                                : 1.0;
  return pr;
}

namespace {

void order_children(LabeledTree& t) {
  for (auto& n : t.nodes)
    std::sort(n.children.begin(), n.children.end(), [&](std::size_t a, std::size_t b) {
      return t.nodes[a].label < t.nodes[b].label;
    });
}

}  // namespace

LabeledTree tree_of(const TreeModel& t, const GenotypeMatrix& m) {
  LabeledTree out;
  out.nodes.push_back({kRoot, {}});
  for (std::size_t j = 0; j < t.parent.size(); ++j)
    out.nodes.push_back({m.event(EventId{j}).name(), {}});
  for (std::size_t j = 0; j < t.parent.size(); ++j) {
    const std::size_t pr = t.parent[j] ? t.parent[j]->value + 1 : 0;
    out.nodes[pr].children.push_back(j + 1);
  }
  out.root = 0;
  order_children(out);
  return out;
}

LabeledTree tree_of(const GroundTruth& gt) {
  if (!gt.is_forest()) throw DataError("not a tree: a node has several parents");
  LabeledTree out;
  out.nodes.push_back({kRoot, {}});
  for (const auto& n : gt.nodes) out.nodes.push_back({parse_event_name(n.label).name(), {}});
  for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
    const std::size_t pr = gt.nodes[j].parents.empty() ? 0 : gt.nodes[j].parents[0] + 1;
    out.nodes[pr].children.push_back(j + 1);
  }
  out.root = 0;
  order_children(out);
  return out;
}

LabeledTree tree_of(const ModelGraph& g) {
  std::map<std::string, std::size_t> id;
  LabeledTree out;
  out.nodes.push_back({kRoot, {}});
  id[kRoot] = 0;
  for (const auto& n : g.nodes)
    if (n != kRoot) {
      id[n] = out.nodes.size();
      out.nodes.push_back({n, {}});
    }

  std::vector<bool> has_parent(out.nodes.size(), false);
  for (const auto& e : g.edges) {
    const std::size_t to = id.at(e.second);
    if (to == 0) throw DataError("not a tree: an edge points at the root");
    if (has_parent[to]) throw DataError("not a tree: " + e.second + " has several parents");
    has_parent[to] = true;
    out.nodes[id.at(e.first)].children.push_back(to);
  }
  for (std::size_t v = 1; v < out.nodes.size(); ++v)
    if (!has_parent[v]) out.nodes[0].children.push_back(v);

  // every node must sit below the root, otherwise the edges hide a cycle
  std::vector<bool> seen(out.nodes.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t c : out.nodes[v].children)
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
  }
  if (reached != out.nodes.size()) throw DataError("not a tree: edges contain a cycle");

  out.root = 0;
  order_children(out);
  return out;
}

namespace {

// postorder flattening for the edit-distance recurrence
struct Flat {
  std::vector<std::string> label;    // 1-based
  std::vector<std::size_t> lml;      // leftmost leaf descendant
  std::vector<std::size_t> keyroots;
};

std::size_t flatten(const LabeledTree& t, std::size_t v, Flat& f) {
  std::size_t first = 0;
  for (std::size_t c : t.nodes[v].children) {
    std::size_t got = flatten(t, c, f);
    if (first == 0) first = got;
  }
  f.label.push_back(t.nodes[v].label);
  f.lml.push_back(first == 0 ? f.label.size() - 1 : first);
  return f.lml.back();
}

Flat flatten(const LabeledTree& t) {
  Flat f;
  f.label.push_back("");  // 1-based
  f.lml.push_back(0);
  flatten(t, t.root, f);
  // keyroots: highest postorder index for each distinct leftmost leaf
  std::map<std::size_t, std::size_t> highest;
  for (std::size_t i = 1; i < f.label.size(); ++i) highest[f.lml[i]] = i;
  for (const auto& [_, i] : highest) f.keyroots.push_back(i);
  std::sort(f.keyroots.begin(), f.keyroots.end());
  return f;
}

}  // namespace

std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b) {
  const Flat fa = flatten(a), fb = flatten(b);
  const std::size_t n1 = fa.label.size() - 1, n2 = fb.label.size() - 1;

  std::vector<std::vector<std::size_t>> td(n1 + 1, std::vector<std::size_t>(n2 + 1, 0));
  std::vector<std::vector<std::size_t>> fd(n1 + 2, std::vector<std::size_t>(n2 + 2, 0));

  for (std::size_t k1 : fa.keyroots)
    for (std::size_t k2 : fb.keyroots) {
      const std::size_t l1 = fa.lml[k1], l2 = fb.lml[k2];
      fd[l1 - 1][l2 - 1] = 0;
      for (std::size_t i = l1; i <= k1; ++i) fd[i][l2 - 1] = fd[i - 1][l2 - 1] + 1;
      for (std::size_t j = l2; j <= k2; ++j) fd[l1 - 1][j] = fd[l1 - 1][j - 1] + 1;
      for (std::size_t i = l1; i <= k1; ++i)
        for (std::size_t j = l2; j <= k2; ++j) {
          if (fa.lml[i] == l1 && fb.lml[j] == l2) {
            const std::size_t relabel = fa.label[i] == fb.label[j] ? 0 : 1;
            fd[i][j] = std::min({fd[i - 1][j] + 1, fd[i][j - 1] + 1, fd[i - 1][j - 1] + relabel});
            td[i][j] = fd[i][j];
          } else {
            fd[i][j] = std::min({fd[i - 1][j] + 1, fd[i][j - 1] + 1,
                                 fd[fa.lml[i] - 1][fb.lml[j] - 1] + td[i][j]});
          }
        }
    }
  return td[n1][n2];
}

EvalReport evaluate(const ModelGraph& inferred, const ModelGraph& truth) {
  EvalReport rep;
  rep.hamming = hamming_distance(inferred, truth);
  rep.pr = precision_recall(inferred, truth);
  try {
    const LabeledTree ta = tree_of(inferred), tb = tree_of(truth);
    rep.ted = tree_edit_distance(ta, tb);
    rep.has_ted = true;
  } catch (const DataError&) {
    rep.has_ted = false;
  }
  return rep;
}

}  // namespace progmod
