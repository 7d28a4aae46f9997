#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "progmod/caprese.hpp"
#include "progmod/capri.hpp"
#include "progmod/confidence.hpp"
#include "progmod/eval.hpp"
#include "progmod/sbcn.hpp"
#include "progmod/synthgen.hpp"

namespace progmod {

// Model files share one schema:
//   {"format":"model", "method":..., "nodes":[{"id","label","kind","alpha"}],
//    "edges":[{"from","to","score","confidence":{"tp","pr","hg","npb"}}],
//    "regularizer", "seed"}
// confidence and the trailing scalars appear only where meaningful.
std::string model_to_json(const TreeModel& t, const GenotypeMatrix& m);
std::string model_to_json(const ProgressionModel& pm);
std::string sbcn_to_json(const Sbcn& s);

// accepts any model file or a ground-truth file; ground truths gain the
// synthetic root so tree comparisons line up
ModelGraph graph_from_json(const std::string& text);

// one node statement per node, one edge statement per edge, both quoted
std::string model_json_to_dot(const std::string& text);
std::set<std::pair<std::string, std::string>> edges_from_dot(const std::string& text);

std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);

std::string bootstrap_reports_to_json(const std::vector<BootstrapReport>& reports);
std::string eval_report_to_json(const EvalReport& rep);
std::string consolidation_to_json(const ConsolidationReport& rep, const GenotypeMatrix& m);

// {"hypotheses":[{"label","target","formula"}], "groups":[...], "homologous":{"op"}}
// A formula is an event name string, {"event","negated"?}, or
// {"op":"and"|"or"|"xor"|"not","args":[...]}; "not" must sit on a leaf.
// target "*" expands over every event absent from the formula.
std::vector<Hypothesis> hypotheses_from_json(const std::string& text, const GenotypeMatrix& m);

// flat object attribute -> stage
TemporalOrder temporal_order_from_json(const std::string& text);

std::string walk_scores_to_json(const std::vector<std::pair<std::string, WalkScores>>& scores);

}  // namespace progmod
