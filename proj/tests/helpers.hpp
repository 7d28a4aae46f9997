#pragma once

#include <progmod/dataset.hpp>
#include <progmod/rng.hpp>

#include <string>
#include <vector>

namespace testutil {

// rows are bit strings like "110"; labels default to a, b, c, ...
inline progmod::GenotypeMatrix make_matrix(const std::vector<std::string>& rows,
                                           std::vector<progmod::EventMeta> events = {}) {
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  if (events.empty())
    for (std::size_t c = 0; c < n; ++c)
      events.push_back({std::string(1, static_cast<char>('a' + c)), "event"});
  std::vector<std::string> samples;
  std::vector<uint8_t> bits;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    samples.push_back("s" + std::to_string(r + 1));
    for (char ch : rows[r]) bits.push_back(ch == '1' ? 1 : 0);
  }
  return progmod::GenotypeMatrix(std::move(samples), std::move(events), std::move(bits));
}

// the six-row fixture used across the hand-derived examples:
// P(a)=4/6, P(b)=2/6, P(c)=1/6, chain a -> b -> c
inline progmod::GenotypeMatrix d6() {
  return make_matrix({"111", "110", "100", "100", "000", "000"});
}

inline progmod::GenotypeMatrix replicate_rows(const progmod::GenotypeMatrix& m, std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < m.rows(); ++r) idx.push_back(r);
  return m.take_rows(idx);
}

// random matrix with per-column densities away from the edges; columns are
// redrawn while degenerate so marginals stay inside (0,1)
inline progmod::GenotypeMatrix random_matrix(progmod::Rng& rng, std::size_t rows,
                                             std::size_t cols) {
  std::vector<progmod::EventMeta> events;
  for (std::size_t c = 0; c < cols; ++c)
    events.push_back({std::string(1, static_cast<char>('a' + c)), "event"});
  std::vector<std::string> samples;
  for (std::size_t r = 0; r < rows; ++r) samples.push_back("s" + std::to_string(r + 1));

  std::vector<uint8_t> bits(rows * cols, 0);
  for (std::size_t c = 0; c < cols; ++c) {
    while (true) {
      const double p = rng.uniform(0.15, 0.85);
      std::size_t ones = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const bool v = rng.bernoulli(p);
        bits[r * cols + c] = v ? 1 : 0;
        ones += v;
      }
      if (ones > 0 && ones < rows) break;
    }
  }
  return progmod::GenotypeMatrix(std::move(samples), std::move(events), std::move(bits));
}

}  // namespace testutil
