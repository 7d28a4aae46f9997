#include "progmod/patterns.hpp"

#include <algorithm>

#include "progmod/errors.hpp"

namespace progmod {

Formula Formula::literal(EventId e, bool negated) {
  Formula f;
  f.is_literal = true;
  f.event = e;
  f.negated = negated;
  return f;
}

Formula Formula::make(BoolOp op, std::vector<Formula> args) {
  if (args.size() < 2) throw DataError("operator needs at least two arguments");
  Formula f;
  f.is_literal = false;
  f.op = op;
  f.args = std::move(args);
  return f;
}

bool evaluate(const Formula& f, const GenotypeMatrix& m, std::size_t row) {
  if (f.is_literal) {
    if (f.event.value >= m.cols()) throw DataError("formula references unknown event column");
    return m.at(row, f.event) != f.negated;
  }
  switch (f.op) {
    case BoolOp::and_:
      for (const auto& a : f.args)
        if (!evaluate(a, m, row)) return false;
      return true;
    case BoolOp::or_:
      for (const auto& a : f.args)
        if (evaluate(a, m, row)) return true;
      return false;
    case BoolOp::xor_: {
      bool acc = false;
      for (const auto& a : f.args) acc ^= evaluate(a, m, row);
      return acc;
    }
  }
  return false;
}

std::string formula_text(const Formula& f, const GenotypeMatrix& m) {
  if (f.is_literal)
    return (f.negated ? "!" : "") + m.event(f.event).name();
  std::vector<std::string> parts;
  parts.reserve(f.args.size());
  for (const auto& a : f.args) parts.push_back(formula_text(a, m));
  std::sort(parts.begin(), parts.end());
  std::string op = f.op == BoolOp::and_ ? "and" : f.op == BoolOp::or_ ? "or" : "xor";
  std::string out = op + "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out + ")";
}

void collect_leaves(const Formula& f, std::set<EventId>& out) {
  if (f.is_literal) {
    out.insert(f.event);
    return;
  }
  for (const auto& a : f.args) collect_leaves(a, out);
}

namespace {

void validate_formula(const Formula& f, const GenotypeMatrix& m) {
  if (f.is_literal) {
    if (f.event.value >= m.cols()) throw DataError("formula references unknown event column");
    return;
  }
  if (f.args.size() < 2) throw DataError("operator needs at least two arguments");
  for (const auto& a : f.args) validate_formula(a, m);
}

}  // namespace

void validate_hypothesis(const Hypothesis& h, const GenotypeMatrix& m) {
  validate_formula(h.formula, m);
  if (h.target.value >= m.cols()) throw DataError("hypothesis target is not an event");
  std::set<EventId> leaves;
  collect_leaves(h.formula, leaves);
  if (leaves.count(h.target))
    throw DataError("hypothesis target " + m.event(h.target).name() + " occurs in its own formula");
}

std::string LiftedMatrix::col_name(std::size_t col) const {
  return col < base_cols() ? base_->event(EventId{col}).name() : extra_[col - base_cols()].text;
}

std::vector<EventId> LiftedMatrix::clause_targets(std::size_t col) const {
  std::vector<EventId> out;
  for (std::size_t hi : clause(col).hypotheses) {
    EventId t = hyps_[hi].target;
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t LiftedMatrix::count(std::size_t col) const {
  if (col < base_cols()) return base_->count(EventId{col});
  const auto& bits = extra_[col - base_cols()].bits;
  std::size_t c = 0;
  for (uint8_t b : bits) c += b;
  return c;
}

std::size_t LiftedMatrix::count_joint(std::size_t a, std::size_t b) const {
  std::size_t c = 0;
  for (std::size_t r = 0; r < rows(); ++r) c += at(r, a) && at(r, b);
  return c;
}

double LiftedMatrix::marginal(std::size_t col) const {
  return static_cast<double>(count(col)) / static_cast<double>(rows());
}

double LiftedMatrix::conditional(std::size_t a, std::size_t b, bool given_negated) const {
  const std::size_t cb = count(b);
  const std::size_t denom = given_negated ? rows() - cb : cb;
  if (denom == 0) throw DataError("undefined conditional on column " + col_name(b));
  const std::size_t cab = count_joint(a, b);
  const std::size_t num = given_negated ? count(a) - cab : cab;
  return static_cast<double>(num) / static_cast<double>(denom);
}

LiftedMatrix lift(const GenotypeMatrix& m, const std::vector<Hypothesis>& hyps) {
  LiftedMatrix lm(m);

  // base columns, for duplicate detection against events
  std::vector<std::vector<uint8_t>> base_cols(m.cols(), std::vector<uint8_t>(m.rows()));
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) base_cols[c][r] = m.at(r, EventId{c});

  for (std::size_t hi = 0; hi < hyps.size(); ++hi) {
    const Hypothesis& h = hyps[hi];
    validate_hypothesis(h, m);

    // top-level conjuncts; a root that is not an and_ is a single clause
    std::vector<const Formula*> clauses;
    if (!h.formula.is_literal && h.formula.op == BoolOp::and_)
      for (const auto& a : h.formula.args) clauses.push_back(&a);
    else
      clauses.push_back(&h.formula);

    LiftedMatrix::HypothesisRef ref;
    ref.target = h.target;
    ref.label = h.label.empty() ? formula_text(h.formula, m) : h.label;

    for (const Formula* cl : clauses) {
      if (cl->is_literal && !cl->negated) {
        ref.clause_cols.push_back(cl->event.value);
        continue;
      }
      std::string text = formula_text(*cl, m);
      std::vector<uint8_t> bits(m.rows());
      for (std::size_t r = 0; r < m.rows(); ++r) bits[r] = evaluate(*cl, m, r);

      // the same clause appearing in several hypotheses shares one column
      std::size_t col = SIZE_MAX;
      for (std::size_t k = 0; k < lm.extra_.size(); ++k)
        if (lm.extra_[k].text == text) {
          col = m.cols() + k;
          break;
        }
      if (col == SIZE_MAX) {
        for (std::size_t c = 0; c < m.cols(); ++c)
          if (bits == base_cols[c])
            throw DataError("pattern duplicates: " + text + " matches event " +
                            m.event(EventId{c}).name());
        for (const auto& other : lm.extra_)
          if (bits == other.bits)
            throw DataError("pattern duplicates: " + text + " matches pattern " + other.text);
        lm.extra_.push_back({text, std::move(bits), {}});
        col = m.cols() + lm.extra_.size() - 1;
      }
      auto& owners = lm.extra_[col - m.cols()].hypotheses;
      if (std::find(owners.begin(), owners.end(), hi) == owners.end()) owners.push_back(hi);
      ref.clause_cols.push_back(col);
    }
    lm.hyps_.push_back(std::move(ref));
  }
  return lm;
}

namespace {

std::vector<EventId> events_with_label(const GenotypeMatrix& m, const std::string& label) {
  std::vector<EventId> out;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (m.event(EventId{c}).label == label) out.push_back(EventId{c});
  return out;
}

Formula op_over_events(BoolOp op, const std::vector<EventId>& evs) {
  std::vector<Formula> lits;
  lits.reserve(evs.size());
  for (EventId e : evs) lits.push_back(Formula::literal(e));
  return Formula::make(op, std::move(lits));
}

std::vector<EventId> expand_targets(const GenotypeMatrix& m, const Formula& f,
                                    const std::string& target) {
  std::set<EventId> leaves;
  collect_leaves(f, leaves);
  std::vector<EventId> out;
  if (target == "*") {
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!leaves.count(EventId{c})) out.push_back(EventId{c});
  } else {
    EventId t = m.resolve(target);
    if (!leaves.count(t)) out.push_back(t);  // a target inside the formula skips the subset
  }
  return out;
}

}  // namespace

std::vector<Hypothesis> group_hypotheses(const GenotypeMatrix& m, const std::set<std::string>& genes,
                                         BoolOp op, std::size_t dim_min, std::size_t dim_max,
                                         const std::string& target) {
  std::vector<std::string> labels(genes.begin(), genes.end());
  std::size_t total_events = 0;
  for (const auto& l : labels) total_events += events_with_label(m, l).size();
  if (total_events < 2) throw DataError("group resolves to fewer than two events");
  if (dim_min < 2 || dim_min > dim_max || dim_max > labels.size())
    throw DataError("group dims must satisfy 2 <= dim_min <= dim_max <= " +
                    std::to_string(labels.size()));

  std::vector<Hypothesis> out;
  const std::size_t g = labels.size();
  for (std::size_t size = dim_min; size <= dim_max; ++size) {
    // lexicographic combinations over the sorted label list
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      std::vector<EventId> evs;
      for (std::size_t i : pick) {
        auto with = events_with_label(m, labels[i]);
        evs.insert(evs.end(), with.begin(), with.end());
      }
      if (evs.size() >= 2) {
        Formula f = op_over_events(op, evs);
        for (EventId t : expand_targets(m, f, target))
          out.push_back({f, t, formula_text(f, m)});
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == g - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

std::vector<Hypothesis> homologous_hypotheses(const GenotypeMatrix& m, BoolOp op) {
  if (op != BoolOp::or_ && op != BoolOp::xor_)
    throw DataError("homologous patterns take or_ or xor_");
  std::set<std::string> seen;
  std::vector<std::string> labels;
  for (const auto& e : m.events())
    if (seen.insert(e.label).second) labels.push_back(e.label);
  std::sort(labels.begin(), labels.end());

  std::vector<Hypothesis> out;
  for (const auto& label : labels) {
    auto evs = events_with_label(m, label);
    if (evs.size() < 2) continue;
    bool co_occur = false;
    for (std::size_t i = 0; i < evs.size() && !co_occur; ++i)
      for (std::size_t j = i + 1; j < evs.size() && !co_occur; ++j)
        co_occur = m.count_joint(evs[i], evs[j]) > 0;
    BoolOp use = co_occur ? op : BoolOp::xor_;
    Formula f = op_over_events(use, evs);
    for (EventId t : expand_targets(m, f, "*")) out.push_back({f, t, label});
  }
  return out;
}

}  // namespace progmod
