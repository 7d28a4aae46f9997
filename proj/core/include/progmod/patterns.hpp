#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "progmod/dataset.hpp"

namespace progmod {

enum class BoolOp { and_, or_, xor_ };

// Boolean expression over events. Negation lives on the leaves; internal
// nodes carry an operator and at least two children. xor_ is odd parity.
struct Formula {
  bool is_literal = true;
  EventId event;        // literal
  bool negated = false; // literal
  BoolOp op = BoolOp::and_;
  std::vector<Formula> args;

  static Formula literal(EventId e, bool negated = false);
  static Formula make(BoolOp op, std::vector<Formula> args);
};

bool evaluate(const Formula& f, const GenotypeMatrix& m, std::size_t row);

// stable text form: operators spelled out, arguments sorted, e.g.
// "xor(event:a, event:b)". Used for clause identity and node naming.
std::string formula_text(const Formula& f, const GenotypeMatrix& m);

void collect_leaves(const Formula& f, std::set<EventId>& out);

// "formula explains target": the claim tested by the lifted analysis
struct Hypothesis {
  Formula formula;
  EventId target;
  std::string label;
};

// throws DataError on malformed formulas or a target occurring in the formula
void validate_hypothesis(const Hypothesis& h, const GenotypeMatrix& m);

// The base matrix plus one appended 0/1 column per distinct non-atomic
// clause. A clause is a top-level and_ child; any other root is one clause.
// Clauses that are plain positive literals reuse the event's own column.
class LiftedMatrix {
 public:
  struct Clause {
    std::string text;                      // formula_text of the clause
    std::vector<uint8_t> bits;             // one per row
    std::vector<std::size_t> hypotheses;   // owners, indices into hypotheses()
  };
  struct HypothesisRef {
    std::vector<std::size_t> clause_cols;  // column ids, in clause order
    EventId target;
    std::string label;
  };

  explicit LiftedMatrix(const GenotypeMatrix& base) : base_(&base) {}

  const GenotypeMatrix& base() const { return *base_; }
  std::size_t rows() const { return base_->rows(); }
  std::size_t base_cols() const { return base_->cols(); }
  std::size_t cols() const { return base_->cols() + extra_.size(); }
  bool is_clause_col(std::size_t col) const { return col >= base_cols(); }

  bool at(std::size_t row, std::size_t col) const {
    return col < base_cols() ? base_->at(row, EventId{col}) : extra_[col - base_cols()].bits[row] != 0;
  }

  // event canonical name or clause text
  std::string col_name(std::size_t col) const;
  const Clause& clause(std::size_t col) const { return extra_[col - base_cols()]; }
  const std::vector<HypothesisRef>& hypotheses() const { return hyps_; }

  // targets a clause column may point at (union over owning hypotheses)
  std::vector<EventId> clause_targets(std::size_t col) const;

  std::size_t count(std::size_t col) const;
  std::size_t count_joint(std::size_t a, std::size_t b) const;
  double marginal(std::size_t col) const;
  // P(a | b) or P(a | not b)
  double conditional(std::size_t a, std::size_t b, bool given_negated = false) const;

  friend LiftedMatrix lift(const GenotypeMatrix& m, const std::vector<Hypothesis>& hyps);

 private:
  const GenotypeMatrix* base_;
  std::vector<Clause> extra_;
  std::vector<HypothesisRef> hyps_;
};

LiftedMatrix lift(const GenotypeMatrix& m, const std::vector<Hypothesis>& hyps);

// One hypothesis per label subset of size in [dim_min, dim_max]; the formula
// applies op to every event carrying a chosen label. target "*" expands to
// each event not in the formula; subsets containing a fixed target are
// skipped.
std::vector<Hypothesis> group_hypotheses(const GenotypeMatrix& m, const std::set<std::string>& genes,
                                         BoolOp op, std::size_t dim_min, std::size_t dim_max,
                                         const std::string& target);

// One formula per label carried by two or more events (e.g. the same gene
// altered in different ways). op may be or_/xor_; or_ is hardened to xor_
// when the label's events never co-occur. Targets expand like "*" above.
std::vector<Hypothesis> homologous_hypotheses(const GenotypeMatrix& m, BoolOp op);

}  // namespace progmod
