#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "hamsim/oracle.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Sample batches are compressed onto their distinct indices before any
/// O(M^2) object is formed; this caps the retained-column count.  Exceeding
/// it means the sample budget outgrew what a dense Gram matrix can hold.
inline constexpr std::size_t kMaxSketchUnique = 2048;

/// Full (per-draw, multiplicity-expanded) matrix views are materialized for
/// diagnostics and small-case tests only when the batch is at most this big.
inline constexpr std::size_t kFullViewLimit = 512;

namespace detail {

/// Distinct drawn indices (sorted ascending) with their multiplicities and
/// the position of each index's first occurrence in draw order.
struct UniqueCounts {
  std::vector<std::uint64_t> indices;
  std::vector<double> counts;
  std::vector<std::size_t> firstDraw;
};

inline UniqueCounts uniqueWithCounts(const std::vector<std::uint64_t>& drawn) {
  std::vector<std::size_t> order(drawn.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return drawn[a] != drawn[b] ? drawn[a] < drawn[b] : a < b;
  });
  UniqueCounts out;
  for (std::size_t k = 0; k < order.size();) {
    const std::uint64_t idx = drawn[order[k]];
    out.indices.push_back(idx);
    out.firstDraw.push_back(order[k]);
    std::size_t run = 0;
    for (; k < order.size() && drawn[order[k]] == idx; ++k) ++run;
    out.counts.push_back(static_cast<double>(run));
  }
  return out;
}

inline void checkUniqueBudget(std::size_t uniqueCount) {
  if (uniqueCount > kMaxSketchUnique)
    throw ResourceError(
        "sketch would retain " + std::to_string(uniqueCount) +
        " distinct columns (limit " + std::to_string(kMaxSketchUnique) +
        "); reduce the sample count or relax epsilon");
}

inline std::vector<SparseRow> fetchRows(const RowOracle& oracle,
                                        const std::vector<std::uint64_t>& idx) {
  std::vector<SparseRow> rows;
  rows.reserve(idx.size());
  for (const std::uint64_t i : idx) rows.push_back(oracle.row(i));
  return rows;
}

/// Position of value in a sorted unique list (value must be present).
inline std::size_t sortedPosition(const std::vector<std::uint64_t>& sorted,
                                  std::uint64_t value) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace detail
}  // namespace hamsim
