#include "progmod/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "progmod/errors.hpp"

namespace progmod {

EventMeta parse_event_name(const std::string& text) {
  auto pos = text.find(':');
  if (pos == std::string::npos) return EventMeta{text, "event"};
  return EventMeta{text.substr(pos + 1), text.substr(0, pos)};
}

GenotypeMatrix::GenotypeMatrix(std::vector<std::string> samples, std::vector<EventMeta> events,
                               std::vector<uint8_t> bits)
    : samples_(std::move(samples)), events_(std::move(events)), bits_(std::move(bits)) {
  if (samples_.empty() || events_.empty()) throw DataError("empty matrix");
  if (bits_.size() != samples_.size() * events_.size())
    throw DataError("matrix bits do not match rows x events");
  for (uint8_t b : bits_)
    if (b > 1) throw DataError("non-binary cell");
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : events_)
    if (!seen.insert({e.kind, e.label}).second)
      throw DataError("duplicate event " + e.name());
}

std::optional<EventId> GenotypeMatrix::find(const std::string& kind,
                                            const std::string& label) const {
  for (std::size_t i = 0; i < events_.size(); ++i)
    if (events_[i].kind == kind && events_[i].label == label) return EventId{i};
  return std::nullopt;
}

EventId GenotypeMatrix::resolve(const std::string& name) const {
  auto pos = name.find(':');
  if (pos != std::string::npos) {
    if (auto e = find(name.substr(0, pos), name.substr(pos + 1))) return *e;
    throw DataError("unknown event " + name);
  }
  std::optional<EventId> hit;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].label != name) continue;
    if (hit) throw DataError("ambiguous event label " + name);
    hit = EventId{i};
  }
  if (!hit) throw DataError("unknown event " + name);
  return *hit;
}

std::size_t GenotypeMatrix::count(EventId e) const {
  std::size_t c = 0;
  for (std::size_t r = 0; r < rows(); ++r) c += at(r, e);
  return c;
}

std::size_t GenotypeMatrix::count_joint(EventId a, EventId b) const {
  std::size_t c = 0;
  for (std::size_t r = 0; r < rows(); ++r) c += at(r, a) && at(r, b);
  return c;
}

double GenotypeMatrix::marginal(EventId e) const {
  return static_cast<double>(count(e)) / static_cast<double>(rows());
}

double GenotypeMatrix::joint(EventId a, EventId b) const {
  return static_cast<double>(count_joint(a, b)) / static_cast<double>(rows());
}

double GenotypeMatrix::conditional(EventId e, EventId given, bool given_negated) const {
  const std::size_t cg = count(given);
  const std::size_t denom = given_negated ? rows() - cg : cg;
  if (denom == 0)
    throw DataError("undefined conditional: " + events_[given.value].name() +
                    (given_negated ? " always observed" : " never observed"));
  const std::size_t cj = count_joint(e, given);
  const std::size_t num = given_negated ? count(e) - cj : cj;
  return static_cast<double>(num) / static_cast<double>(denom);
}

GenotypeMatrix GenotypeMatrix::take_rows(const std::vector<std::size_t>& idx) const {
  std::vector<std::string> samples;
  samples.reserve(idx.size());
  std::vector<uint8_t> bits;
  bits.reserve(idx.size() * cols());
  for (std::size_t r : idx) {
    samples.push_back(samples_[r]);
    const uint8_t* p = row_data(r);
    bits.insert(bits.end(), p, p + cols());
  }
  return GenotypeMatrix(std::move(samples), events_, std::move(bits));
}

GenotypeMatrix GenotypeMatrix::take_columns(const std::vector<EventId>& keep) const {
  std::vector<EventMeta> events;
  events.reserve(keep.size());
  for (EventId e : keep) events.push_back(events_[e.value]);
  std::vector<uint8_t> bits;
  bits.reserve(rows() * keep.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (EventId e : keep) bits.push_back(at(r, e) ? 1 : 0);
  return GenotypeMatrix(samples_, std::move(events), std::move(bits));
}

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

GenotypeMatrix import_matrix(std::istream& in, TableFormat fmt) {
  const char sep = fmt == TableFormat::csv ? ',' : '\t';
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty matrix");
  auto header = split_line(line, sep);
  if (header.size() < 2) throw DataError("empty matrix: header has no event columns");

  std::vector<EventMeta> events;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto name = strip(header[i]);
    if (name.empty()) throw DataError("empty event name in header column " + std::to_string(i));
    events.push_back(parse_event_name(name));
  }

  std::vector<std::string> samples;
  std::vector<uint8_t> bits;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto cells = split_line(line, sep);
    if (cells.size() != header.size())
      throw DataError("ragged row at line " + std::to_string(lineno));
    samples.push_back(strip(cells[0]));
    for (std::size_t i = 1; i < cells.size(); ++i) {
      auto v = strip(cells[i]);
      if (v == "0")
        bits.push_back(0);
      else if (v == "1")
        bits.push_back(1);
      else
        throw DataError("non-binary cell '" + v + "' at line " + std::to_string(lineno));
    }
  }
  if (samples.empty()) throw DataError("empty matrix: no sample rows");
  return GenotypeMatrix(std::move(samples), std::move(events), std::move(bits));
}

GenotypeMatrix import_matrix_file(const std::string& path, TableFormat fmt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return import_matrix(in, fmt);
}

void write_matrix(std::ostream& out, const GenotypeMatrix& m, TableFormat fmt) {
  const char sep = fmt == TableFormat::csv ? ',' : '\t';
  out << "sample";
  for (const auto& e : m.events()) out << sep << e.name();
  out << "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.samples()[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out << sep << (m.at(r, EventId{c}) ? '1' : '0');
    out << "\n";
  }
}

ConsolidationReport consolidate(const GenotypeMatrix& m) {
  ConsolidationReport rep;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::size_t k = m.count(EventId{c});
    if (k == 0 || k == m.rows()) rep.degenerate.push_back({EventId{c}, m.marginal(EventId{c})});
  }

  std::map<std::vector<uint8_t>, std::vector<EventId>> cols;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::vector<uint8_t> col(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) col[r] = m.at(r, EventId{c});
    cols[std::move(col)].push_back(EventId{c});
  }
  for (auto& [_, group] : cols)
    if (group.size() > 1) rep.duplicate_events.push_back(group);

  std::map<std::vector<uint8_t>, std::vector<std::string>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<uint8_t> row(m.row_data(r), m.row_data(r) + m.cols());
    rows[std::move(row)].push_back(m.samples()[r]);
  }
  for (auto& [_, group] : rows)
    if (group.size() > 1) rep.duplicate_samples.push_back(group);

  // deterministic order regardless of map iteration details
  auto by_first = [](const auto& a, const auto& b) { return a.front() < b.front(); };
  std::sort(rep.duplicate_events.begin(), rep.duplicate_events.end(), by_first);
  std::sort(rep.duplicate_samples.begin(), rep.duplicate_samples.end(), by_first);
  return rep;
}

GenotypeMatrix select_events(const GenotypeMatrix& m, double min_freq,
                             const std::set<std::string>& keep) {
  std::vector<EventId> kept;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    EventId e{c};
    const auto& meta = m.event(e);
    if (m.marginal(e) >= min_freq || keep.count(meta.label) || keep.count(meta.name()))
      kept.push_back(e);
  }
  if (kept.empty()) throw DataError("zero events after selection");
  return m.take_columns(kept);
}

}  // namespace progmod
