#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Row weight function h(i, H_{:,i}) used for sampling: the diagonal entry
/// (PSD mode) or the squared row norm (general Hermitian mode).
enum class WeightKind { Diagonal, SquaredRowNorm };

inline std::string to_string(WeightKind k) {
  return k == WeightKind::Diagonal ? "diagonal" : "squared-row-norm";
}

/// A bit-string prefix L of length `len`: the `len` most-significant qubit
/// bits of a row index.  It selects the contiguous index block
/// [bits << (n-len), (bits+1) << (n-len)).
struct Prefix {
  std::uint64_t bits = 0;
  unsigned len = 0;

  Prefix child(unsigned bit) const { return {(bits << 1) | bit, len + 1}; }

  std::uint64_t blockBegin(unsigned n) const { return bits << (n - len); }
  std::uint64_t blockEnd(unsigned n) const { return (bits + 1) << (n - len); }

  /// Parses e.g. "01" into a prefix (tests and diagnostics).
  static Prefix fromString(const std::string& s) {
    Prefix p;
    for (char c : s) {
      if (c != '0' && c != '1') throw UsageError("prefix must be over {0,1}");
      p = p.child(c == '1' ? 1u : 0u);
    }
    return p;
  }

  std::string str() const {
    std::string s(len, '0');
    for (unsigned k = 0; k < len; ++k)
      if ((bits >> (len - 1 - k)) & 1u) s[k] = '1';
    return s;
  }
};

/// Row-computable, row-searchable Hamiltonian: rows are enumerable on demand
/// and prefix-block weight sums w(S(L)) are computable for both weight kinds.
///
/// Immutable after construction; all member functions are safe for
/// concurrent readers.  marginal() keeps an evaluation counter so tests and
/// diagnostics can verify the n-evaluations-per-draw sampling cost.
class RowOracle {
 public:
  RowOracle() = default;
  virtual ~RowOracle() = default;
  // The atomic counter and once-flags are lazy caches; copies start fresh
  // and rebuild them on demand.  This keeps concrete oracles copyable.
  RowOracle(const RowOracle&) noexcept {}
  RowOracle& operator=(const RowOracle&) noexcept { return *this; }

  virtual unsigned qubits() const = 0;
  std::uint64_t dim() const { return dimension(qubits()); }

  /// PSD-mode oracles expose a nonnegative diagonal sampling weight.
  virtual Mode mode() const = 0;
  bool isPsd() const { return mode() != Mode::Hermitian; }

  /// Nonzeros of row i, sorted by column.
  virtual SparseRow row(std::uint64_t i) const = 0;

  /// Diagonal entry H_{ii} (real by Hermiticity).
  virtual double diag(std::uint64_t i) const = 0;

  /// Squared row 2-norm.
  virtual double rowSqNorm(std::uint64_t i) const = 0;

  /// Prefix-block weight w(S(L)).  Counted; see marginalEvaluations().
  double marginal(const Prefix& p, WeightKind kind) const {
    marginalEvals_.fetch_add(1, std::memory_order_relaxed);
    return marginalImpl(p, kind);
  }

  /// Total weight w(S(empty)); computed once and cached (not counted).
  double totalWeight(WeightKind kind) const {
    auto& slot = kind == WeightKind::Diagonal ? totalDiag_ : totalSq_;
    std::call_once(kind == WeightKind::Diagonal ? onceDiag_ : onceSq_,
                   [&] { slot = marginalImpl(Prefix{}, kind); });
    return slot;
  }

  std::uint64_t marginalEvaluations() const {
    return marginalEvals_.load(std::memory_order_relaxed);
  }
  void resetMarginalEvaluations() const {
    marginalEvals_.store(0, std::memory_order_relaxed);
  }

 protected:
  virtual double marginalImpl(const Prefix& p, WeightKind kind) const = 0;

 private:
  mutable std::atomic<std::uint64_t> marginalEvals_{0};
  mutable std::once_flag onceDiag_;
  mutable std::once_flag onceSq_;
  mutable double totalDiag_ = 0.0;
  mutable double totalSq_ = 0.0;
};

/// sum_j H_{i,j} psi_j: one row of H applied to a sparse state, by merging
/// the two sorted lists (O(min(s,q) + log max(s,q)) via galloping search).
inline Complex applyRow(const RowOracle& oracle, const SparseState& psi,
                        std::uint64_t i) {
  return dotRowState(oracle.row(i), psi);
}

/// H x for a sorted sparse vector x, materialized on its support via column
/// scatter: H x = sum_j x_j * conj(row(j)).  One row fetch per nonzero of x;
/// accumulation order is deterministic (ascending source index).
inline std::vector<Entry> applyOracleSparse(const RowOracle& oracle,
                                            const std::vector<Entry>& x) {
  std::vector<Entry> contrib;
  for (const Entry& e : x) {
    const SparseRow r = oracle.row(e.index);
    for (const Entry& h : r.entries())
      contrib.push_back({h.index, e.value * std::conj(h.value)});
  }
  std::stable_sort(
      contrib.begin(), contrib.end(),
      [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> out;
  out.reserve(contrib.size());
  for (std::size_t k = 0; k < contrib.size();) {
    const std::uint64_t idx = contrib[k].index;
    Complex sum(0.0, 0.0);
    for (; k < contrib.size() && contrib[k].index == idx; ++k)
      sum += contrib[k].value;
    out.push_back({idx, sum});
  }
  return out;
}

}  // namespace hamsim
