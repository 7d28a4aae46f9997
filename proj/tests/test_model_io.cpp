#include <doctest.h>

#include <progmod/caprese.hpp>
#include <progmod/capri.hpp>
#include <progmod/confidence.hpp>
#include <progmod/dataset.hpp>
#include <progmod/errors.hpp>
#include <progmod/eval.hpp>
#include <progmod/model_io.hpp>
#include <progmod/sbcn.hpp>

#include <json.hpp>

#include <sstream>

#include "helpers.hpp"

using namespace progmod;
using testutil::d6;
using testutil::make_matrix;
using testutil::replicate_rows;
using json = nlohmann::json;

namespace {

GroundTruth chain_gt() {
  GroundTruth gt;
  gt.kind = TopologyKind::forest;
  gt.seed = 3;
  gt.nodes.push_back({"a", 1, {}, 0.85, 0.85, {}});
  gt.nodes.push_back({"b", 2, {0}, 0.80, 0.68, {}});
  gt.nodes.push_back({"c", 3, {1}, 0.75, 0.51, {}});
  return gt;
}

}  // namespace

TEST_CASE("tree model files expose the root and round trip as graphs") {
  GenotypeMatrix m = replicate_rows(d6(), 10);
  TreeModel t = reconstruct_tree(m, 0.5);
  const std::string text = model_to_json(t, m);

  json j = json::parse(text);
  CHECK(j["format"] == "model");
  CHECK(j["method"] == "tree");
  CHECK(j["lambda"] == 0.5);
  REQUIRE(j["nodes"].size() == 4);
  CHECK(j["nodes"][0]["id"] == "<root>");
  CHECK(j["nodes"][0]["kind"] == "root");
  CHECK(j["nodes"][0]["alpha"] == 1.0);
  CHECK(j["nodes"][1]["id"] == "event:a");
  CHECK(j["edges"].size() == 3);

  ModelGraph g = graph_from_json(text);
  ModelGraph direct = graph_of(t, m);
  CHECK(g.nodes == direct.nodes);
  CHECK(g.edges == direct.edges);
}

TEST_CASE("progression model files carry per-edge confidence blocks") {
  GenotypeMatrix m = replicate_rows(d6(), 10);
  CapriParams params;
  params.nboot = 10;
  params.seed = 11;
  CapriResult res = reconstruct(m, {}, params);
  REQUIRE(res.models.size() == 2);
  const ProgressionModel& pm = res.models[0];
  const std::string text = model_to_json(pm);

  json j = json::parse(text);
  CHECK(j["format"] == "model");
  CHECK(j["method"] == "progression");
  CHECK(j["regularizer"] == "bic");
  CHECK(j["seed"] == pm.seed);
  CHECK(j["fit_score"].get<double>() == doctest::Approx(pm.score));
  REQUIRE(j["edges"].size() == pm.edges.size());
  for (const auto& ej : j["edges"]) {
    REQUIRE(ej.contains("confidence"));
    CHECK(ej["confidence"].contains("tp"));
    CHECK(ej["confidence"].contains("pr"));
    CHECK(ej["confidence"].contains("hg"));
  }
  CHECK(j["nodes"][0]["label"] == "a");  // plain events drop their kind prefix

  ModelGraph g = graph_from_json(text);
  ModelGraph direct = graph_of(pm);
  CHECK(g.nodes == direct.nodes);
  CHECK(g.edges == direct.edges);
}

TEST_CASE("sbcn files name both decision poles") {
  CategoricalTable t;
  t.attributes = {"sex", "adm"};
  for (int i = 0; i < 40; ++i) {
    t.samples.push_back("r" + std::to_string(i + 1));
    const bool male = i < 20;
    const bool yes = male ? i < 16 : i < 24;
    t.rows.push_back({male ? "M" : "F", yes ? "Y" : "N"});
  }
  TemporalOrder order;
  order.level["sex"] = 0;
  order.level["adm"] = 1;
  Binarized b = binarize(t, order);
  SbcnParams params;
  params.decision_neg = "adm=N";
  params.decision_pos = "adm=Y";
  Sbcn s = learn_sbcn(b.matrix, b.level, params);

  const std::string text = sbcn_to_json(s);
  json j = json::parse(text);
  CHECK(j["method"] == "sbcn");
  CHECK(j["decision_neg"] == "adm=N");
  CHECK(j["decision_pos"] == "adm=Y");
  CHECK(j["nodes"][0]["id"] == "sex=F");
  CHECK(j["nodes"][0]["level"] == 0);

  ModelGraph g = graph_from_json(text);
  CHECK(g.nodes.count("sex=F") == 1);
  CHECK(g.nodes.count("adm=Y") == 1);
}

TEST_CASE("ground truth files read back as rooted graphs") {
  GroundTruth gt = chain_gt();
  const std::string text = ground_truth_to_json(gt);

  ModelGraph g = graph_from_json(text);
  ModelGraph direct = graph_of(gt, true);
  CHECK(g.nodes == direct.nodes);
  CHECK(g.edges == direct.edges);
  CHECK(g.nodes.count("<root>") == 1);
  CHECK(g.edges.count({"<root>", "event:a"}) == 1);
  CHECK(g.edges.count({"event:a", "event:b"}) == 1);
}

TEST_CASE("ground truth serialization is lossless") {
  GroundTruth gt = chain_gt();
  gt.kind = TopologyKind::disconnected_dag;
  gt.disjunctive = true;
  gt.nodes.push_back({"d", 3, {0, 1}, 0.5, 0.3, {0.2, 0.3, 0.5}});

  GroundTruth back = ground_truth_from_json(ground_truth_to_json(gt));
  CHECK(back.kind == gt.kind);
  CHECK(back.disjunctive == gt.disjunctive);
  CHECK(back.seed == gt.seed);
  REQUIRE(back.nodes.size() == gt.nodes.size());
  for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
    CHECK(back.nodes[i].label == gt.nodes[i].label);
    CHECK(back.nodes[i].level == gt.nodes[i].level);
    CHECK(back.nodes[i].parents == gt.nodes[i].parents);
    CHECK(back.nodes[i].fire_prob == gt.nodes[i].fire_prob);
    CHECK(back.nodes[i].marginal == gt.nodes[i].marginal);
    CHECK(back.nodes[i].subset_weights == gt.nodes[i].subset_weights);
  }
}

TEST_CASE("ground truth parsing rejects broken files") {
  CHECK_THROWS_WITH_AS(ground_truth_from_json("{not json"), doctest::Contains("malformed json"),
                       DataError);
  CHECK_THROWS_AS(ground_truth_from_json(R"({"kind":"lattice","nodes":[]})"), DataError);
  CHECK_THROWS_WITH_AS(ground_truth_from_json(R"({"kind":"forest","nodes":[]})"),
                       doctest::Contains("no nodes"), DataError);
  const char* orphan = R"({"kind":"forest","nodes":[
      {"label":"a","level":1,"parents":[1],"fire_prob":0.5}]})";
  CHECK_THROWS_WITH_AS(ground_truth_from_json(orphan), doctest::Contains("precede"), DataError);
  const char* typeless = R"({"kind":"forest","nodes":[{"label":"a"}]})";
  CHECK_THROWS_WITH_AS(ground_truth_from_json(typeless),
                       doctest::Contains("malformed ground truth"), DataError);
}

TEST_CASE("model graph parsing rejects dangling edges and junk") {
  CHECK_THROWS_WITH_AS(graph_from_json("[1,2"), doctest::Contains("malformed json"), DataError);
  CHECK_THROWS_WITH_AS(graph_from_json(R"({"edges":[]})"),
                       doctest::Contains("malformed model file"), DataError);
  const char* dangling = R"({"nodes":[{"id":"a"}],"edges":[{"from":"a","to":"b"}]})";
  CHECK_THROWS_WITH_AS(graph_from_json(dangling), doctest::Contains("edge endpoint missing"),
                       DataError);
}

TEST_CASE("dot export quotes names and the edge set reads back") {
  GenotypeMatrix m = replicate_rows(d6(), 10);
  TreeModel t = reconstruct_tree(m, 0.5);
  const std::string text = model_to_json(t, m);
  const std::string dot = model_json_to_dot(text);
  CHECK(dot.rfind("digraph model {", 0) == 0);
  CHECK(dot.find("\"<root>\" [kind=\"root\"]") != std::string::npos);
  CHECK(dot.find("\"<root>\" -> \"event:a\"") != std::string::npos);

  auto edges = edges_from_dot(dot);
  ModelGraph direct = graph_of(t, m);
  CHECK(edges == direct.edges);

  // names survive escaping
  const char* spiky = R"({"nodes":[{"id":"a\"b"},{"id":"c\\d"}],
                          "edges":[{"from":"a\"b","to":"c\\d","score":0.125}]})";
  const std::string sd = model_json_to_dot(spiky);
  auto se = edges_from_dot(sd);
  REQUIRE(se.size() == 1);
  CHECK(se.begin()->first == "a\"b");
  CHECK(se.begin()->second == "c\\d");
  CHECK(sd.find("[label=\"0.125\"]") != std::string::npos);

  CHECK_THROWS_WITH_AS(edges_from_dot("a -> b;\n"), doctest::Contains("unparseable edge line"),
                       DataError);
  CHECK(edges_from_dot("digraph model {\n}\n").empty());
}

TEST_CASE("bootstrap reports serialize every tally") {
  BootstrapReport r;
  r.kind = "parametric";
  r.regularizer = "none";
  r.nboot = 40;
  r.skipped = 3;
  r.model_freq = 0.925;
  r.edge_freq["<root> -> event:a"] = 1.0;
  r.edge_freq["event:a -> event:b"] = 0.9;
  r.reference_edges["event:a -> event:b"] = 0.9;

  const std::string text = bootstrap_reports_to_json({r, r});
  json j = json::parse(text);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["kind"] == "parametric");
  CHECK(j[0]["regularizer"] == "none");
  CHECK(j[0]["nboot"] == 40);
  CHECK(j[0]["skipped"] == 3);
  CHECK(j[0]["model_freq"] == 0.925);
  CHECK(j[0]["edge_freq"]["event:a -> event:b"] == 0.9);
  CHECK(j[0]["edge_freq"].size() == 2);
  CHECK(j[0]["reference_edges"].size() == 1);
}

TEST_CASE("evaluation reports write a null edit distance when it is undefined") {
  ModelGraph chain;
  chain.nodes = {"<root>", "a", "b"};
  chain.edges = {{"<root>", "a"}, {"a", "b"}};
  EvalReport same = evaluate(chain, chain);
  json j = json::parse(eval_report_to_json(same));
  CHECK(j["hamming"] == 0);
  CHECK(j["tp"] == 2);
  CHECK(j["fp"] == 0);
  CHECK(j["fn"] == 0);
  CHECK(j["precision"] == 1.0);
  CHECK(j["recall"] == 1.0);
  CHECK(j["ted"] == 0);

  ModelGraph multi = chain;
  multi.edges.insert({"<root>", "b"});  // b now has two parents, no tree reading
  json j2 = json::parse(eval_report_to_json(evaluate(chain, multi)));
  CHECK(j2["ted"].is_null());
  CHECK(j2["hamming"] == 1);
}

TEST_CASE("consolidation findings are reported with event names") {
  GenotypeMatrix m = make_matrix({"1100", "1100", "0010", "0000"});
  ConsolidationReport rep = consolidate(m);
  json j = json::parse(consolidation_to_json(rep, m));
  CHECK(j["clean"] == false);
  REQUIRE(j["degenerate"].size() == 1);
  CHECK(j["degenerate"][0]["event"] == "event:d");
  CHECK(j["degenerate"][0]["marginal"] == 0.0);
  REQUIRE(j["duplicate_events"].size() == 1);
  CHECK(j["duplicate_events"][0] == json::array({"event:a", "event:b"}));
  REQUIRE(j["duplicate_samples"].size() == 1);
  CHECK(j["duplicate_samples"][0] == json::array({"s1", "s2"}));

  GenotypeMatrix ok = make_matrix({"10", "01", "11"});
  json jok = json::parse(consolidation_to_json(consolidate(ok), ok));
  CHECK(jok["clean"] == true);
}

TEST_CASE("hypothesis files cover literals, operators and wildcards") {
  GenotypeMatrix m = make_matrix({"1100", "0110", "0011", "1010"});

  auto one = hypotheses_from_json(R"({"hypotheses":[{"target":"c","formula":"a"}]})", m);
  REQUIRE(one.size() == 1);
  CHECK(one[0].formula.is_literal);
  CHECK(one[0].formula.event == EventId{0});
  CHECK_FALSE(one[0].formula.negated);
  CHECK(one[0].target == EventId{2});

  auto starred = hypotheses_from_json(
      R"({"hypotheses":[{"target":"*","formula":{"op":"xor","args":["a","b"]}}]})", m);
  REQUIRE(starred.size() == 2);  // every event outside the formula
  CHECK(starred[0].target == EventId{2});
  CHECK(starred[1].target == EventId{3});
  CHECK(starred[0].formula.op == BoolOp::xor_);

  auto neg = hypotheses_from_json(
      R"({"hypotheses":[{"target":"a","formula":{"event":"b","negated":true}},
                        {"target":"b","formula":{"op":"not","args":["a"]}}]})",
      m);
  REQUIRE(neg.size() == 2);
  CHECK(neg[0].formula.negated);
  CHECK(neg[1].formula.negated);
  CHECK(neg[1].formula.event == EventId{0});

  auto grouped = hypotheses_from_json(
      R"({"groups":[{"genes":["a","b","c"],"op":"or","min":2,"max":2,"target":"d"}]})", m);
  CHECK(grouped.size() == 3);  // the three pairs
  for (const auto& h : grouped) CHECK(h.target == EventId{3});
}

TEST_CASE("homologous requests fall back to exclusive-or when events never co-occur") {
  GenotypeMatrix m = make_matrix({"101", "010", "100"},
                                 {{"x", "mut"}, {"x", "del"}, {"y", "event"}});
  auto hyps = hypotheses_from_json(R"({"homologous":{"op":"or"}})", m);
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].label == "x");
  CHECK(hyps[0].target == EventId{2});
  CHECK_FALSE(hyps[0].formula.is_literal);
  CHECK(hyps[0].formula.op == BoolOp::xor_);
}

TEST_CASE("hypothesis files reject malformed and self-referential entries") {
  GenotypeMatrix m = make_matrix({"1100", "0110", "0011", "1010"});
  CHECK_THROWS_WITH_AS(
      hypotheses_from_json(R"({"hypotheses":[{"target":"c","formula":{"op":"nand","args":["a","b"]}}]})", m),
      doctest::Contains("unknown operator"), DataError);
  CHECK_THROWS_WITH_AS(
      hypotheses_from_json(R"({"hypotheses":[{"target":"c","formula":{"op":"not","args":["a","b"]}}]})", m),
      doctest::Contains("exactly one argument"), DataError);
  CHECK_THROWS_WITH_AS(
      hypotheses_from_json(
          R"({"hypotheses":[{"target":"c","formula":{"op":"not","args":[{"op":"or","args":["a","b"]}]}}]})",
          m),
      doctest::Contains("single events only"), DataError);
  CHECK_THROWS_WITH_AS(
      hypotheses_from_json(R"({"hypotheses":[{"target":"a","formula":"a"}]})", m),
      doctest::Contains("occurs in its own formula"), DataError);
  CHECK_THROWS_WITH_AS(hypotheses_from_json(R"({"hypotheses":[{"formula":"a"}]})", m),
                       doctest::Contains("malformed hypotheses"), DataError);
  CHECK_THROWS_WITH_AS(
      hypotheses_from_json(R"({"hypotheses":[{"target":"c","formula":7}]})", m),
      doctest::Contains("event name or an operator node"), DataError);
}

TEST_CASE("temporal orders parse from flat objects only") {
  TemporalOrder o = temporal_order_from_json(R"({"sex":0,"adm":2})");
  CHECK(o.level.at("sex") == 0);
  CHECK(o.level.at("adm") == 2);
  CHECK_THROWS_WITH_AS(temporal_order_from_json("[0,1]"), doctest::Contains("must be an object"),
                       DataError);
  CHECK_THROWS_WITH_AS(temporal_order_from_json(R"({"sex":-1})"),
                       doctest::Contains("non-negative integer"), DataError);
  CHECK_THROWS_AS(temporal_order_from_json(R"({"sex":1.5})"), DataError);
}

TEST_CASE("walk score tables mark unreached poles and optional fields") {
  WalkScores full;
  full.ds_neg = 1.0;
  full.reached_neg = 10;
  full.reached_pos = 0;
  full.as_neg = 2.5;
  full.has_fed = true;
  full.fed = 0.4;
  full.has_gds = true;
  full.gds_neg = 0.75;
  WalkScores bare;
  bare.ds_neg = 0.5;
  bare.reached_neg = 5;
  bare.reached_pos = 5;
  bare.as_neg = 1.0;
  bare.as_pos = 2.0;

  json j = json::parse(walk_scores_to_json({{"sex=F", full}, {"sex=M", bare}}));
  REQUIRE(j.size() == 2);
  CHECK(j[0]["node"] == "sex=F");
  CHECK(j[0]["ds_pos"] == 0.0);
  CHECK(j[0]["as_neg"] == 2.5);
  CHECK(j[0]["as_pos"].is_null());
  CHECK(j[0]["fed_neg"] == 0.4);
  CHECK(j[0]["gds_neg"] == 0.75);
  CHECK(j[0]["gds_pos"] == 0.25);
  CHECK_FALSE(j[1].contains("fed_neg"));
  CHECK_FALSE(j[1].contains("gds_neg"));
  CHECK(j[1]["as_pos"] == 2.0);
}
