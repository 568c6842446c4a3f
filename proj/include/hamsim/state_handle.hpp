#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/numeric.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Largest qubit count for which full-vector materialization is permitted.
inline constexpr QubitCount kMaxDenseQubits = 24;

/// Lazy handle for an evolved state of the common sketch form
///
///   psihat = phase * ( psi + rowCoeff * H psi + sum_a w_a * H[:, U_a] )
///
/// where U is a sorted list of distinct sketch columns and w their combined
/// coefficients.  Amplitude queries cost one oracle row fetch plus a merge
/// against U; nothing of size 2^n is ever stored unless explicitly requested.
class EvolvedState {
 public:
  EvolvedState(const RowOracle& oracle, SparseState psi,
               std::vector<std::uint64_t> columnIndices,
               Eigen::VectorXcd columnWeights, Complex rowCoeff,
               Complex phase = Complex(1.0, 0.0))
      : oracle_(&oracle),
        psi_(std::move(psi)),
        columns_(std::move(columnIndices)),
        weights_(std::move(columnWeights)),
        rowCoeff_(rowCoeff),
        phase_(phase) {
    if (psi_.qubits() != oracle_->qubits())
      throw UsageError("evolved state: oracle and state qubit counts differ");
    if (static_cast<std::size_t>(weights_.size()) != columns_.size())
      throw UsageError("evolved state: column/weight length mismatch");
    const std::uint64_t N = oracle_->dim();
    for (std::size_t a = 0; a < columns_.size(); ++a) {
      if (columns_[a] >= N)
        throw UsageError("evolved state: column index out of range");
      if (a > 0 && columns_[a] <= columns_[a - 1])
        throw UsageError("evolved state: columns must be sorted and unique");
    }
  }

  QubitCount qubits() const { return oracle_->qubits(); }
  const RowOracle& oracle() const { return *oracle_; }
  const SparseState& inputState() const { return psi_; }
  const std::vector<std::uint64_t>& columnIndices() const { return columns_; }
  const Eigen::VectorXcd& columnWeights() const { return weights_; }
  Complex rowCoeff() const { return rowCoeff_; }
  Complex phase() const { return phase_; }

  /// Folds an extra global phase (e.g. the trace-shift factor) into every
  /// subsequently queried amplitude.
  void multiplyPhase(Complex factor) { phase_ *= factor; }

  /// Single-amplitude query: one row fetch + O(s + |U|) merge.
  Complex amplitude(std::uint64_t i) const {
    if (i >= oracle_->dim())
      throw UsageError("amplitude index " + std::to_string(i) +
                       " out of range for " + std::to_string(qubits()) +
                       " qubits");
    const SparseRow row = oracle_->row(i);
    Complex acc = psi_.amplitude(i);
    if (rowCoeff_ != Complex(0.0, 0.0))
      acc += rowCoeff_ * dotRowState(row, psi_);
    const auto& entries = row.entries();
    std::size_t e = 0;
    for (std::size_t a = 0; a < columns_.size(); ++a) {
      while (e < entries.size() && entries[e].index < columns_[a]) ++e;
      if (e == entries.size()) break;
      if (entries[e].index == columns_[a]) acc += weights_[a] * entries[e].value;
    }
    return phase_ * acc;
  }

  /// All algebraically reachable amplitudes, sorted by index.  Support is
  /// bounded by |psi| + s|psi| + s|U| regardless of 2^n.  Entries whose
  /// contributions cancel exactly are retained with value 0.
  std::vector<Entry> materializeSupport() const {
    std::vector<Entry> contrib;
    for (const Entry& e : psi_.entries()) contrib.push_back(e);
    if (rowCoeff_ != Complex(0.0, 0.0)) {
      for (const Entry& e : psi_.entries()) {
        const SparseRow r = oracle_->row(e.index);
        for (const Entry& h : r.entries())
          contrib.push_back(
              {h.index, rowCoeff_ * e.value * std::conj(h.value)});
      }
    }
    for (std::size_t a = 0; a < columns_.size(); ++a) {
      const SparseRow r = oracle_->row(columns_[a]);
      const Complex w = weights_[a];
      for (const Entry& h : r.entries())
        contrib.push_back({h.index, w * std::conj(h.value)});
    }
    std::stable_sort(contrib.begin(), contrib.end(),
                     [](const Entry& x, const Entry& y) {
                       return x.index < y.index;
                     });
    std::vector<Entry> out;
    out.reserve(contrib.size());
    for (std::size_t k = 0; k < contrib.size();) {
      const std::uint64_t idx = contrib[k].index;
      Complex sum(0.0, 0.0);
      for (; k < contrib.size() && contrib[k].index == idx; ++k)
        sum += contrib[k].value;
      out.push_back({idx, phase_ * sum});
    }
    return out;
  }

  /// Full 2^n vector; refused above kMaxDenseQubits.
  Eigen::VectorXcd materializeDense() const {
    if (qubits() > kMaxDenseQubits)
      throw UsageError("dense materialization limited to " +
                       std::to_string(kMaxDenseQubits) + " qubits");
    Eigen::VectorXcd out =
        Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(oracle_->dim()));
    for (const Entry& e : materializeSupport())
      out(static_cast<Eigen::Index>(e.index)) = e.value;
    return out;
  }

  /// Euclidean norm of the evolved state (support-bounded work).
  double norm() const {
    NeumaierSum s;
    for (const Entry& e : materializeSupport()) s.add(std::norm(e.value));
    return std::sqrt(s.value());
  }

 private:
  const RowOracle* oracle_;
  SparseState psi_;
  std::vector<std::uint64_t> columns_;
  Eigen::VectorXcd weights_;
  Complex rowCoeff_;
  Complex phase_;
};

}  // namespace hamsim
