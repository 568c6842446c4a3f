#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hamsim/numeric.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Tabulated prefix-block weight sums for both weight kinds.
///
/// Stores cumulative sums over either every row (dense) or a sorted list of
/// present rows (rows absent from the list weigh zero).  A prefix marginal
/// is a difference of two cumulative values, so sibling marginals sum to the
/// parent's *exactly* in floating point; full-length prefixes are answered
/// from the stored per-row weight so leaf marginals are exact as well.
class PrefixWeights {
 public:
  PrefixWeights() = default;

  /// Dense table: weights[i] applies to row i; vectors have length N.
  static PrefixWeights dense(std::vector<double> diagWeights,
                             std::vector<double> sqWeights) {
    PrefixWeights w;
    w.dense_ = true;
    w.diag_ = std::move(diagWeights);
    w.sq_ = std::move(sqWeights);
    w.buildCumulative();
    return w;
  }

  /// Sparse table over strictly sorted `rows` (possibly empty when the
  /// operator has no nonzero rows); weight vectors are parallel to `rows`.
  static PrefixWeights overRows(std::vector<std::uint64_t> rows,
                                std::vector<double> diagWeights,
                                std::vector<double> sqWeights) {
    PrefixWeights w;
    w.dense_ = false;
    w.rows_ = std::move(rows);
    w.diag_ = std::move(diagWeights);
    w.sq_ = std::move(sqWeights);
    w.buildCumulative();
    return w;
  }

  /// w(S(L)) for qubit count n.
  double marginal(const Prefix& p, WeightKind kind, unsigned n) const {
    const auto& weights = kind == WeightKind::Diagonal ? diag_ : sq_;
    const auto& cum = kind == WeightKind::Diagonal ? cumDiag_ : cumSq_;
    const std::uint64_t lo = p.blockBegin(n);
    const std::uint64_t hi = p.blockEnd(n);
    if (p.len == n) {
      // Exact leaf weight, not a cumulative difference.
      const std::size_t pos = position(lo);
      return (pos < count() && rowAt(pos) == lo) ? weights[pos] : 0.0;
    }
    return cum[position(hi)] - cum[position(lo)];
  }

 private:
  std::size_t count() const { return diag_.size(); }
  bool isDense() const { return dense_; }

  std::uint64_t rowAt(std::size_t pos) const {
    return isDense() ? pos : rows_[pos];
  }

  /// Number of table positions with row index < r.
  std::size_t position(std::uint64_t r) const {
    if (isDense()) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(
        std::lower_bound(rows_.begin(), rows_.end(), r) - rows_.begin());
  }

  void buildCumulative() {
    cumDiag_.resize(count() + 1);
    cumSq_.resize(count() + 1);
    NeumaierSum d, s;
    cumDiag_[0] = cumSq_[0] = 0.0;
    for (std::size_t k = 0; k < count(); ++k) {
      d.add(diag_[k]);
      s.add(sq_[k]);
      cumDiag_[k + 1] = d.value();
      cumSq_[k + 1] = s.value();
    }
  }

  bool dense_ = true;
  std::vector<std::uint64_t> rows_;  // unused when dense (row == position)
  std::vector<double> diag_;
  std::vector<double> sq_;
  std::vector<double> cumDiag_;
  std::vector<double> cumSq_;
};

}  // namespace hamsim
