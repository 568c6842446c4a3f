#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "hamsim/oracle.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// View of H - alpha*I over a base oracle (non-owning).  Marginals are
/// derived from the base's in closed form:
///   diagonal:  w'(S) = w(S) - alpha * |S|
///   sq-norm:   w'(S) = w(S) - 2*alpha*diagSum(S) + alpha^2 * |S|
/// so no additional weight tables are needed.  Shifted squared norms are
/// clamped at zero against floating-point cancellation.
class ShiftedOracle final : public RowOracle {
 public:
  ShiftedOracle(const RowOracle& base, double alpha, bool diagFallback = false)
      : base_(&base), alpha_(alpha), fallback_(diagFallback) {}

  unsigned qubits() const override { return base_->qubits(); }
  Mode mode() const override { return Mode::Hermitian; }

  double alpha() const { return alpha_; }
  const RowOracle& base() const { return *base_; }
  /// True when the base could not supply tr(H) and alpha fell back to 0.
  bool usedFallback() const { return fallback_; }

  SparseRow row(std::uint64_t i) const override {
    SparseRow base = base_->row(i);
    if (alpha_ == 0.0) return base;
    std::vector<Entry> e = base.entries();
    auto it = std::lower_bound(
        e.begin(), e.end(), i,
        [](const Entry& a, std::uint64_t idx) { return a.index < idx; });
    if (it != e.end() && it->index == i) {
      const Complex nv = it->value - alpha_;
      if (nv == Complex{})
        e.erase(it);
      else
        it->value = nv;
    } else {
      e.insert(it, Entry{i, Complex{-alpha_, 0.0}});
    }
    return SparseRow(std::move(e), dim());
  }

  double diag(std::uint64_t i) const override { return base_->diag(i) - alpha_; }

  double rowSqNorm(std::uint64_t i) const override {
    // Same expression as the full-length marginal so leaf weights match it
    // bit-for-bit.
    return shiftedSq(base_->rowSqNorm(i), base_->diag(i), 1.0);
  }

 protected:
  double marginalImpl(const Prefix& p, WeightKind kind) const override {
    const unsigned n = qubits();
    const double count =
        static_cast<double>(p.blockEnd(n) - p.blockBegin(n));
    if (kind == WeightKind::Diagonal)
      return base_->marginal(p, WeightKind::Diagonal) - alpha_ * count;
    return shiftedSq(base_->marginal(p, WeightKind::SquaredRowNorm),
                     base_->marginal(p, WeightKind::Diagonal), count);
  }

 private:
  double shiftedSq(double baseSq, double baseDiagSum, double count) const {
    return std::max(
        baseSq - 2.0 * alpha_ * baseDiagSum + alpha_ * alpha_ * count, 0.0);
  }

  const RowOracle* base_;
  double alpha_;
  bool fallback_;
};

/// Builds the Frobenius-mass-minimizing shift H - (tr H / 2^n) I.  If the
/// base cannot produce a diagonal marginal, falls back to alpha = 0 and
/// flags it (see ShiftedOracle::usedFallback).
inline ShiftedOracle traceShift(const RowOracle& base) {
  double trace = 0.0;
  bool ok = true;
  try {
    trace = base.totalWeight(WeightKind::Diagonal);
    if (!std::isfinite(trace)) ok = false;
  } catch (const Error&) {
    ok = false;
  }
  if (!ok) return ShiftedOracle(base, 0.0, /*diagFallback=*/true);
  const double alpha = trace / static_cast<double>(base.dim());
  return ShiftedOracle(base, alpha);
}

}  // namespace hamsim
