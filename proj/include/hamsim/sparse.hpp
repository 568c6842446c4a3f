#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hamsim/types.hpp"

namespace hamsim {

/// One nonzero of a sparse row or sparse state: (index, complex value).
struct Entry {
  std::uint64_t index = 0;
  Complex value{};
};

namespace detail {

inline void checkSortedNonzero(const std::vector<Entry>& entries,
                               std::uint64_t dim, const char* what) {
  std::uint64_t prev = 0;
  bool first = true;
  for (const Entry& e : entries) {
    if (!first && e.index <= prev)
      throw DomainError(std::string(what) + ": indices must be strictly increasing");
    if (e.index >= dim)
      throw DomainError(std::string(what) + ": index " + std::to_string(e.index) +
                        " out of range [0, " + std::to_string(dim) + ")");
    if (e.value == Complex{})
      throw DomainError(std::string(what) + ": explicit zero stored at index " +
                        std::to_string(e.index));
    prev = e.index;
    first = false;
  }
}

inline void sortAndCheckUnique(std::vector<Entry>& entries, const char* what) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t k = 1; k < entries.size(); ++k)
    if (entries[k].index == entries[k - 1].index)
      throw DomainError(std::string(what) + ": duplicate index " +
                        std::to_string(entries[k].index));
}

/// Binary search over a sorted entry list; nullptr when absent.
inline const Entry* findEntry(const std::vector<Entry>& entries,
                              std::uint64_t index) {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), index,
      [](const Entry& e, std::uint64_t i) { return e.index < i; });
  return (it != entries.end() && it->index == index) ? &*it : nullptr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SparseRow: the nonzeros of one Hamiltonian row, strictly sorted by column.
// ---------------------------------------------------------------------------

class SparseRow {
 public:
  SparseRow() = default;

  /// Takes a strictly sorted, zero-free entry list (throws DomainError
  /// otherwise).  `dim` bounds the column indices.
  SparseRow(std::vector<Entry> entries, std::uint64_t dim)
      : entries_(std::move(entries)) {
    detail::checkSortedNonzero(entries_, dim, "SparseRow");
  }

  /// Sorts, drops exact zeros, and rejects duplicate columns.
  static SparseRow fromUnsorted(std::vector<Entry> entries, std::uint64_t dim) {
    std::erase_if(entries, [](const Entry& e) { return e.value == Complex{}; });
    detail::sortAndCheckUnique(entries, "SparseRow");
    return SparseRow(std::move(entries), dim);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Value at a column, zero when absent.  O(log s).
  Complex at(std::uint64_t col) const {
    const Entry* e = detail::findEntry(entries_, col);
    return e ? e->value : Complex{};
  }

  /// Squared 2-norm of the row.
  double sqNorm() const {
    double s = 0.0;
    for (const Entry& e : entries_) s += std::norm(e.value);
    return s;
  }

 private:
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// SparseState: a q-sparse unit state vector.
// ---------------------------------------------------------------------------

class SparseState {
 public:
  /// Validates sorting, range, and unit norm (within 1e-12).
  SparseState(unsigned n, std::vector<Entry> amplitudes)
      : n_(checkQubitCount(n)), entries_(std::move(amplitudes)) {
    detail::checkSortedNonzero(entries_, dimension(n_), "SparseState");
    const double nrm = norm();
    if (std::abs(nrm - 1.0) > 1e-12)
      throw DomainError("SparseState: norm " + std::to_string(nrm) +
                        " is not 1 within 1e-12");
  }

  /// Basis state e_index.
  static SparseState basis(unsigned n, std::uint64_t index) {
    if (index >= dimension(checkQubitCount(n)))
      throw UsageError("basis index " + std::to_string(index) +
                       " out of range for n=" + std::to_string(n));
    return SparseState(n, {{index, Complex{1.0, 0.0}}});
  }

  /// Sorts, drops zeros, normalizes to unit 2-norm.
  static SparseState normalized(unsigned n, std::vector<Entry> amplitudes) {
    std::erase_if(amplitudes, [](const Entry& e) { return e.value == Complex{}; });
    detail::sortAndCheckUnique(amplitudes, "SparseState");
    double sq = 0.0;
    for (const Entry& e : amplitudes) sq += std::norm(e.value);
    if (!(sq > 0.0))
      throw DomainError("SparseState: cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(sq);
    for (Entry& e : amplitudes) e.value *= inv;
    return SparseState(n, std::move(amplitudes));
  }

  unsigned qubits() const { return n_; }
  std::uint64_t dim() const { return dimension(n_); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t sparsity() const { return entries_.size(); }

  Complex amplitude(std::uint64_t i) const {
    const Entry* e = detail::findEntry(entries_, i);
    return e ? e->value : Complex{};
  }

  double norm() const {
    double s = 0.0;
    for (const Entry& e : entries_) s += std::norm(e.value);
    return std::sqrt(s);
  }

 private:
  unsigned n_;
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Sorted-list inner products.
// ---------------------------------------------------------------------------

namespace detail {

/// Calls f(a_value, b_value) for every index common to both sorted lists.
/// Walks the shorter list with binary search when the lengths are lopsided,
/// so the cost is O(min + log max) rather than O(min * log max) on average,
/// and plain two-pointer otherwise.
template <class F>
void forEachCommon(const std::vector<Entry>& a, const std::vector<Entry>& b,
                   F&& f) {
  if (a.empty() || b.empty()) return;
  if (a.size() > b.size() * 8 || b.size() > a.size() * 8) {
    const auto& small = a.size() < b.size() ? a : b;
    const auto& big = a.size() < b.size() ? b : a;
    const bool aSmall = a.size() < b.size();
    auto lo = big.begin();
    for (const Entry& e : small) {
      lo = std::lower_bound(lo, big.end(), e.index,
                            [](const Entry& x, std::uint64_t i) { return x.index < i; });
      if (lo == big.end()) break;
      if (lo->index == e.index) {
        aSmall ? f(e.value, lo->value) : f(lo->value, e.value);
        ++lo;
      }
    }
    return;
  }
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      f(ia->value, ib->value);
      ++ia;
      ++ib;
    }
  }
}

}  // namespace detail

/// Row-vector times state: sum_j row_j * psi_j (no conjugation).
inline Complex dotRowState(const SparseRow& row, const SparseState& psi) {
  Complex acc{};
  detail::forEachCommon(row.entries(), psi.entries(),
                        [&](Complex r, Complex p) { acc += r * p; });
  return acc;
}

/// Row-vector times a sorted sparse entry list.
inline Complex dotRowEntries(const SparseRow& row, const std::vector<Entry>& v) {
  Complex acc{};
  detail::forEachCommon(row.entries(), v,
                        [&](Complex r, Complex p) { acc += r * p; });
  return acc;
}

/// sum_i a_i * conj(b_i) over two sorted entry lists (Gram inner product of
/// conjugated rows, used for column inner products of Hermitian matrices).
inline Complex dotRowConjRow(const SparseRow& a, const SparseRow& b) {
  Complex acc{};
  detail::forEachCommon(a.entries(), b.entries(),
                        [&](Complex x, Complex y) { acc += x * std::conj(y); });
  return acc;
}

}  // namespace hamsim
