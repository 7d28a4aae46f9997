#include "progmod/model_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "progmod/errors.hpp"

namespace progmod {

using json = nlohmann::ordered_json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed json: ") + e.what());
  }
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

constexpr const char* kRoot = "<root>";

}  // namespace

std::string model_to_json(const TreeModel& t, const GenotypeMatrix& m) {
  json j;
  j["format"] = "model";
  j["method"] = "tree";
  j["lambda"] = t.lambda;
  j["nodes"] = json::array();
  j["nodes"].push_back({{"id", kRoot}, {"label", kRoot}, {"kind", "root"}, {"alpha", 1.0}});
  for (std::size_t c = 0; c < t.parent.size(); ++c) {
    const auto& e = m.event(EventId{c});
    j["nodes"].push_back(
        {{"id", e.name()}, {"label", e.label}, {"kind", e.kind}, {"alpha", t.labeling[c]}});
  }
  j["edges"] = json::array();
  for (std::size_t c = 0; c < t.parent.size(); ++c) {
    const std::string from = t.parent[c] ? m.event(*t.parent[c]).name() : kRoot;
    j["edges"].push_back(
        {{"from", from}, {"to", m.event(EventId{c}).name()}, {"score", t.edge_score[c]}});
  }
  return j.dump(2) + "\n";
}

std::string model_to_json(const ProgressionModel& pm) {
  json j;
  j["format"] = "model";
  j["method"] = "progression";
  j["regularizer"] = regularizer_name(pm.reg);
  j["fit_score"] = pm.score;
  j["seed"] = pm.seed;
  j["nodes"] = json::array();
  for (std::size_t c = 0; c < pm.names.size(); ++c) {
    const std::string label =
        pm.is_clause[c] ? pm.names[c] : parse_event_name(pm.names[c]).label;
    j["nodes"].push_back(
        {{"id", pm.names[c]}, {"label", label}, {"kind", pm.kinds[c]}, {"alpha", pm.labeling[c]}});
  }
  j["edges"] = json::array();
  for (const auto& e : pm.edges) {
    json conf = {{"tp", e.p_tp}, {"pr", e.p_pr}, {"hg", e.hyper_p}};
    j["edges"].push_back({{"from", pm.names[e.from]},
                          {"to", pm.names[e.to]},
                          {"score", e.lambda_pr},
                          {"confidence", conf}});
  }
  return j.dump(2) + "\n";
}

std::string sbcn_to_json(const Sbcn& s) {
  json j;
  j["format"] = "model";
  j["method"] = "sbcn";
  j["regularizer"] = regularizer_name(s.reg);
  j["fit_score"] = s.score;
  j["seed"] = s.seed;
  j["decision_neg"] = s.node_name(s.decision_neg);
  j["decision_pos"] = s.node_name(s.decision_pos);
  j["nodes"] = json::array();
  for (std::size_t c = 0; c < s.nodes.size(); ++c)
    j["nodes"].push_back({{"id", s.node_name(c)},
                          {"label", s.nodes[c].label},
                          {"kind", s.nodes[c].kind},
                          {"level", s.level[c]}});
  j["edges"] = json::array();
  for (const auto& e : s.edges)
    j["edges"].push_back(
        {{"from", s.node_name(e.from)}, {"to", s.node_name(e.to)}, {"score", e.weight}});
  return j.dump(2) + "\n";
}

ModelGraph graph_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    if (j.value("format", "") == "ground-truth")
      return graph_of(ground_truth_from_json(text), true);
    ModelGraph g;
    for (const auto& n : j.at("nodes")) g.nodes.insert(n.at("id").get<std::string>());
    for (const auto& e : j.at("edges")) {
      const auto from = e.at("from").get<std::string>();
      const auto to = e.at("to").get<std::string>();
      if (!g.nodes.count(from) || !g.nodes.count(to))
        throw DataError("edge endpoint missing from nodes: " + from + " -> " + to);
      g.edges.insert({from, to});
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string model_json_to_dot(const std::string& text) {
  const json j = parse(text);
  std::ostringstream out;
  out << "digraph model {\n";
  try {
    for (const auto& n : j.at("nodes")) {
      out << "  " << dot_quote(n.at("id").get<std::string>());
      if (n.contains("kind")) out << " [kind=" << dot_quote(n.at("kind").get<std::string>()) << "]";
      out << ";\n";
    }
    for (const auto& e : j.at("edges")) {
      out << "  " << dot_quote(e.at("from").get<std::string>()) << " -> "
          << dot_quote(e.at("to").get<std::string>());
      if (e.contains("score")) out << " [label=" << dot_quote(fmt6(e.at("score").get<double>())) << "]";
      out << ";\n";
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  out << "}\n";
  return out.str();
}

std::set<std::pair<std::string, std::string>> edges_from_dot(const std::string& text) {
  std::set<std::pair<std::string, std::string>> edges;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("->") == std::string::npos) continue;
    std::vector<std::string> quoted;
    for (std::size_t i = 0; i < line.size();) {
      if (line[i] != '"') {
        ++i;
        continue;
      }
      std::string cur;
      for (++i; i < line.size() && line[i] != '"'; ++i) {
        if (line[i] == '\\' && i + 1 < line.size()) ++i;
        cur += line[i];
      }
      ++i;
      quoted.push_back(cur);
    }
    if (quoted.size() < 2) throw DataError("unparseable edge line: " + line);
    edges.insert({quoted[0], quoted[1]});
  }
  return edges;
}

std::string ground_truth_to_json(const GroundTruth& gt) {
  json j;
  j["format"] = "ground-truth";
  j["kind"] = topology_kind_name(gt.kind);
  j["disjunctive"] = gt.disjunctive;
  j["seed"] = gt.seed;
  j["nodes"] = json::array();
  for (const auto& n : gt.nodes) {
    json nj = {{"label", n.label},
               {"level", n.level},
               {"parents", n.parents},
               {"fire_prob", n.fire_prob},
               {"marginal", n.marginal}};
    if (!n.subset_weights.empty()) nj["subset_weights"] = n.subset_weights;
    j["nodes"].push_back(nj);
  }
  return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    GroundTruth gt;
    gt.kind = topology_kind_from_name(j.at("kind").get<std::string>());
    gt.disjunctive = j.value("disjunctive", false);
    gt.seed = j.value("seed", 0ULL);
    for (const auto& nj : j.at("nodes")) {
      GroundTruthNode n;
      n.label = nj.at("label").get<std::string>();
      n.level = nj.at("level").get<std::size_t>();
      n.parents = nj.at("parents").get<std::vector<std::size_t>>();
      n.fire_prob = nj.at("fire_prob").get<double>();
      n.marginal = nj.value("marginal", 0.0);
      if (nj.contains("subset_weights"))
        n.subset_weights = nj.at("subset_weights").get<std::vector<double>>();
      for (std::size_t p : n.parents)
        if (p >= gt.nodes.size())
          throw DataError("ground truth parents must precede their child: " + n.label);
      gt.nodes.push_back(std::move(n));
    }
    if (gt.nodes.empty()) throw DataError("ground truth has no nodes");
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ground truth: ") + e.what());
  }
}

std::string bootstrap_reports_to_json(const std::vector<BootstrapReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json j;
    j["kind"] = r.kind;
    j["regularizer"] = r.regularizer;
    j["nboot"] = r.nboot;
    j["skipped"] = r.skipped;
    j["model_freq"] = r.model_freq;
    j["edge_freq"] = json::object();
    for (const auto& [k, v] : r.edge_freq) j["edge_freq"][k] = v;
    j["reference_edges"] = json::object();
    for (const auto& [k, v] : r.reference_edges) j["reference_edges"][k] = v;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string eval_report_to_json(const EvalReport& rep) {
  json j;
  j["hamming"] = rep.hamming;
  j["tp"] = rep.pr.tp;
  j["fp"] = rep.pr.fp;
  j["fn"] = rep.pr.fn;
  j["precision"] = rep.pr.precision;
  j["recall"] = rep.pr.recall;
  if (rep.has_ted)
    j["ted"] = rep.ted;
  else
    j["ted"] = nullptr;
  return j.dump(2) + "\n";
}

std::string consolidation_to_json(const ConsolidationReport& rep, const GenotypeMatrix& m) {
  json j;
  j["clean"] = rep.clean();
  j["degenerate"] = json::array();
  for (const auto& [e, p] : rep.degenerate)
    j["degenerate"].push_back({{"event", m.event(e).name()}, {"marginal", p}});
  j["duplicate_events"] = json::array();
  for (const auto& group : rep.duplicate_events) {
    json names = json::array();
    for (EventId e : group) names.push_back(m.event(e).name());
    j["duplicate_events"].push_back(names);
  }
  j["duplicate_samples"] = rep.duplicate_samples;
  return j.dump(2) + "\n";
}

namespace {

BoolOp op_from_name(const std::string& name) {
  if (name == "and") return BoolOp::and_;
  if (name == "or") return BoolOp::or_;
  if (name == "xor") return BoolOp::xor_;
  throw DataError("unknown operator " + name);
}

Formula formula_from_json(const json& fj, const GenotypeMatrix& m) {
  if (fj.is_string()) return Formula::literal(m.resolve(fj.get<std::string>()));
  if (!fj.is_object()) throw DataError("formula must be an event name or an operator node");
  if (fj.contains("event"))
    return Formula::literal(m.resolve(fj.at("event").get<std::string>()),
                            fj.value("negated", false));
  const auto op = fj.at("op").get<std::string>();
  const auto& args = fj.at("args");
  if (op == "not") {
    if (args.size() != 1) throw DataError("negation takes exactly one argument");
    Formula inner = formula_from_json(args[0], m);
    if (!inner.is_literal) throw DataError("negation applies to single events only");
    inner.negated = !inner.negated;
    return inner;
  }
  std::vector<Formula> parsed;
  for (const auto& a : args) parsed.push_back(formula_from_json(a, m));
  return Formula::make(op_from_name(op), std::move(parsed));
}

}  // namespace

std::vector<Hypothesis> hypotheses_from_json(const std::string& text, const GenotypeMatrix& m) {
  const json j = parse(text);
  std::vector<Hypothesis> out;
  try {
    for (const auto& hj : j.value("hypotheses", json::array())) {
      const Formula f = formula_from_json(hj.at("formula"), m);
      const auto target = hj.at("target").get<std::string>();
      const auto label = hj.value("label", std::string{});
      if (target == "*") {
        std::set<EventId> used;
        collect_leaves(f, used);
        for (std::size_t c = 0; c < m.cols(); ++c)
          if (!used.count(EventId{c})) out.push_back({f, EventId{c}, label});
      } else {
        out.push_back({f, m.resolve(target), label});
      }
    }
    for (const auto& gj : j.value("groups", json::array())) {
      std::set<std::string> genes;
      for (const auto& g : gj.at("genes")) genes.insert(g.get<std::string>());
      const auto hyps = group_hypotheses(m, genes, op_from_name(gj.at("op").get<std::string>()),
                                         gj.value("min", std::size_t{2}),
                                         gj.value("max", genes.size()),
                                         gj.value("target", std::string{"*"}));
      out.insert(out.end(), hyps.begin(), hyps.end());
    }
    if (j.contains("homologous")) {
      const auto hyps =
          homologous_hypotheses(m, op_from_name(j.at("homologous").at("op").get<std::string>()));
      out.insert(out.end(), hyps.begin(), hyps.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed hypotheses: ") + e.what());
  }
  for (const auto& h : out) validate_hypothesis(h, m);
  return out;
}

TemporalOrder temporal_order_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) throw DataError("temporal order must be an object of attribute stages");
  TemporalOrder order;
  for (const auto& [attr, lv] : j.items()) {
    if (!lv.is_number_integer() || lv.get<long long>() < 0)
      throw DataError("stage of " + attr + " must be a non-negative integer");
    order.level[attr] = lv.get<std::size_t>();
  }
  return order;
}

std::string walk_scores_to_json(const std::vector<std::pair<std::string, WalkScores>>& scores) {
  json arr = json::array();
  for (const auto& [node, ws] : scores) {
    json j;
    j["node"] = node;
    j["ds_neg"] = ws.ds_neg;
    j["ds_pos"] = 1.0 - ws.ds_neg;
    j["reached_neg"] = ws.reached_neg;
    j["reached_pos"] = ws.reached_pos;
    j["as_neg"] = ws.reached_neg ? json(ws.as_neg) : json(nullptr);
    j["as_pos"] = ws.reached_pos ? json(ws.as_pos) : json(nullptr);
    if (ws.has_fed) j["fed_neg"] = ws.fed;
    if (ws.has_gds) {
      j["gds_neg"] = ws.gds_neg;
      j["gds_pos"] = 1.0 - ws.gds_neg;
    }
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

}  // namespace progmod
