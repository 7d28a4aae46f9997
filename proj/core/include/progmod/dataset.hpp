#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace progmod {

// Column index into a GenotypeMatrix. Kept as a distinct type so row and
// column indices cannot be swapped silently.
struct EventId {
  std::size_t value = 0;
  friend bool operator==(const EventId&, const EventId&) = default;
  friend auto operator<=>(const EventId&, const EventId&) = default;
};

struct EventMeta {
  std::string label;
  std::string kind = "event";

  // canonical "kind:label" form, as accepted in headers and on the CLI
  std::string name() const { return kind + ":" + label; }

  friend bool operator==(const EventMeta&, const EventMeta&) = default;
};

// parses "kind:label" at the first colon; a bare label gets kind "event"
EventMeta parse_event_name(const std::string& text);

enum class TableFormat { csv, tsv };

// Cross-sectional 0/1 observations: one row per sample, one column per event.
// Probabilities are exact rationals over the row count; counts are integers
// and the division happens once at the point of use.
class GenotypeMatrix {
 public:
  GenotypeMatrix() = default;
  GenotypeMatrix(std::vector<std::string> samples, std::vector<EventMeta> events,
                 std::vector<uint8_t> bits);

  std::size_t rows() const { return samples_.size(); }
  std::size_t cols() const { return events_.size(); }

  bool at(std::size_t row, EventId e) const { return bits_[row * events_.size() + e.value] != 0; }
  const uint8_t* row_data(std::size_t row) const { return bits_.data() + row * events_.size(); }

  const std::vector<std::string>& samples() const { return samples_; }
  const std::vector<EventMeta>& events() const { return events_; }
  const EventMeta& event(EventId e) const { return events_[e.value]; }

  std::optional<EventId> find(const std::string& kind, const std::string& label) const;
  // resolves "kind:label" or a bare label (unique across kinds); throws DataError
  EventId resolve(const std::string& name) const;

  std::size_t count(EventId e) const;
  std::size_t count_joint(EventId a, EventId b) const;

  double marginal(EventId e) const;
  double joint(EventId a, EventId b) const;
  // P(e | given) or, with given_negated, P(e | not given)
  double conditional(EventId e, EventId given, bool given_negated = false) const;

  // new matrix whose row r is this->row idx[r]; sample ids are reused
  GenotypeMatrix take_rows(const std::vector<std::size_t>& idx) const;
  GenotypeMatrix take_columns(const std::vector<EventId>& keep) const;

  void set(std::size_t row, EventId e, bool v) { bits_[row * events_.size() + e.value] = v ? 1 : 0; }

 private:
  std::vector<std::string> samples_;
  std::vector<EventMeta> events_;
  std::vector<uint8_t> bits_;  // row-major
};

struct ConsolidationReport {
  // events observed in no sample or in every sample, with their marginal
  std::vector<std::pair<EventId, double>> degenerate;
  // maximal groups (size >= 2) of events with bit-identical columns
  std::vector<std::vector<EventId>> duplicate_events;
  // maximal groups (size >= 2) of sample ids with bit-identical rows
  std::vector<std::vector<std::string>> duplicate_samples;

  bool clean() const {
    return degenerate.empty() && duplicate_events.empty() && duplicate_samples.empty();
  }
};

// header row gives event names, first column is the sample id
GenotypeMatrix import_matrix(std::istream& in, TableFormat fmt);
GenotypeMatrix import_matrix_file(const std::string& path, TableFormat fmt);
void write_matrix(std::ostream& out, const GenotypeMatrix& m, TableFormat fmt);

ConsolidationReport consolidate(const GenotypeMatrix& m);

// keeps events with marginal >= min_freq or with label (or kind:label) in keep
GenotypeMatrix select_events(const GenotypeMatrix& m, double min_freq,
                             const std::set<std::string>& keep);

}  // namespace progmod
