#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/oracle.hpp"
#include "hamsim/parallel.hpp"
#include "hamsim/sampler.hpp"
#include "hamsim/sketch_common.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Rescaled-row sketch of a general Hermitian H built from a squared-row-norm
/// sample batch: the per-draw matrix A has columns h_{t_j} / sqrt(M p(t_j))
/// (h_i = conjugated i-th row, i.e. the i-th column of H), so E[AA^*] = H^2.
/// Repeated draws compress exactly onto distinct indices with per-column
/// scales sqrt(c_a / (M p_a)): the compressed outer product AA^* — and hence
/// every polynomial applied through the Gram matrix — is unchanged.
struct SketchHermitian {
  std::vector<std::uint64_t> indices;        ///< drawn indices, in draw order
  std::vector<std::uint64_t> uniqueIndices;  ///< sorted distinct indices U
  std::vector<double> counts;                ///< multiplicities
  std::vector<double> scales;                ///< sqrt(c_a / (M p_a))

  /// Sparse columns of the compressed A: col_a = scales[a] * conj(row(U_a)).
  std::vector<std::vector<Entry>> scaledColumns;

  Eigen::MatrixXcd B;          ///< compressed Gram A^*A (u x u, Hermitian PSD)
  std::vector<Entry> uState;   ///< H psi on its support, sorted by index
  Eigen::VectorXcd v;          ///< A^* psi
  Eigen::VectorXcd z;          ///< A^* (H psi)

  bool hasFullView = false;    ///< M x M diagnostics for small batches
  Eigen::MatrixXcd fullB;
  Eigen::VectorXcd fullV;
  Eigen::VectorXcd fullZ;

  std::size_t sampleCount() const { return indices.size(); }
  std::size_t retained() const { return uniqueIndices.size(); }
};

/// Assembles the Hermitian sketch: scaled sparse columns, the u x u Gram
/// matrix B = A^*A (each entry one sparse dot product), the materialized
/// H psi, and the projected vectors v = A^* psi, z = A^* (H psi).
inline SketchHermitian buildSketchHermitian(const RowOracle& oracle,
                                            const SampleBatch& batch,
                                            const SparseState& psi) {
  if (batch.kind != WeightKind::SquaredRowNorm)
    throw UsageError(
        "buildSketchHermitian requires a squared-row-norm-weighted batch");
  if (psi.qubits() != oracle.qubits())
    throw UsageError("buildSketchHermitian: state/oracle qubit mismatch");
  if (batch.indices.empty()) throw UsageError("empty sample batch");

  SketchHermitian sk;
  sk.indices = batch.indices;
  detail::UniqueCounts uc = detail::uniqueWithCounts(batch.indices);
  detail::checkUniqueBudget(uc.indices.size());
  sk.uniqueIndices = std::move(uc.indices);
  sk.counts = std::move(uc.counts);
  const std::size_t u = sk.uniqueIndices.size();
  const double M = static_cast<double>(batch.indices.size());

  sk.scales.resize(u);
  for (std::size_t a = 0; a < u; ++a) {
    const double p = batch.probabilities[uc.firstDraw[a]];
    if (!(p > 0.0))
      throw OracleFaultError("sampled index " +
                             std::to_string(sk.uniqueIndices[a]) +
                             " carries non-positive probability");
    sk.scales[a] = std::sqrt(sk.counts[a] / (M * p));
  }

  const std::vector<SparseRow> rows =
      detail::fetchRows(oracle, sk.uniqueIndices);
  sk.scaledColumns.resize(u);
  for (std::size_t a = 0; a < u; ++a) {
    sk.scaledColumns[a].reserve(rows[a].entries().size());
    for (const Entry& e : rows[a].entries())
      sk.scaledColumns[a].push_back(
          {e.index, sk.scales[a] * std::conj(e.value)});
  }

  // Gram matrix: B_ab = scale_a scale_b sum_i row_a[i] conj(row_b[i]).
  const Eigen::Index ui = static_cast<Eigen::Index>(u);
  sk.B.resize(ui, ui);
  parallelForBlocks(u, 16, [&](std::size_t, std::size_t aLo, std::size_t aHi) {
    for (std::size_t a = aLo; a < aHi; ++a) {
      sk.B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) =
          Complex(sk.scales[a] * sk.scales[a] * rows[a].sqNorm(), 0.0);
      for (std::size_t b = a + 1; b < u; ++b) {
        const Complex val = sk.scales[a] * sk.scales[b] *
                            dotRowConjRow(rows[a], rows[b]);
        sk.B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = val;
        sk.B(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
            std::conj(val);
      }
    }
  });
  if (!sk.B.allFinite())
    throw NumericalError("buildSketchHermitian produced a non-finite Gram");

  sk.uState = applyOracleSparse(oracle, psi.entries());

  sk.v.resize(ui);
  sk.z.resize(ui);
  for (std::size_t a = 0; a < u; ++a) {
    sk.v(static_cast<Eigen::Index>(a)) =
        sk.scales[a] * dotRowState(rows[a], psi);
    sk.z(static_cast<Eigen::Index>(a)) =
        sk.scales[a] * dotRowEntries(rows[a], sk.uState);
  }

  if (batch.indices.size() <= kFullViewLimit) {
    sk.hasFullView = true;
    const Eigen::Index Mi = static_cast<Eigen::Index>(batch.indices.size());
    std::vector<std::size_t> pa(batch.indices.size());
    std::vector<double> drawScale(batch.indices.size());
    for (std::size_t j = 0; j < batch.indices.size(); ++j) {
      pa[j] = detail::sortedPosition(sk.uniqueIndices, batch.indices[j]);
      drawScale[j] = 1.0 / std::sqrt(M * batch.probabilities[j]);
    }
    sk.fullB.resize(Mi, Mi);
    sk.fullV.resize(Mi);
    sk.fullZ.resize(Mi);
    for (Eigen::Index j = 0; j < Mi; ++j) {
      const SparseRow& rj = rows[pa[static_cast<std::size_t>(j)]];
      const double sj = drawScale[static_cast<std::size_t>(j)];
      sk.fullV(j) = sj * dotRowState(rj, psi);
      sk.fullZ(j) = sj * dotRowEntries(rj, sk.uState);
      for (Eigen::Index k = 0; k < Mi; ++k) {
        const std::size_t pk = pa[static_cast<std::size_t>(k)];
        sk.fullB(j, k) = sj * drawScale[static_cast<std::size_t>(k)] *
                         dotRowConjRow(rj, rows[pk]);
      }
    }
  }
  return sk;
}

}  // namespace hamsim
