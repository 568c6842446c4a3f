#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/oracle.hpp"
#include "hamsim/parallel.hpp"
#include "hamsim/pinv.hpp"
#include "hamsim/sampler.hpp"
#include "hamsim/sketch_common.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Nyström sketch of a PSD Hamiltonian built from a diagonal-weighted sample
/// batch.  Repeated draws are folded onto distinct columns: with counts c and
/// C = diag(sqrt c), the per-draw objects A (2^n x M) and B (M x M) compress
/// exactly via
///
///   A B^+ A^*  =  (A_U C) (C H[U,U] C)^+ (C A_U^*),   A_U = H[:, U],
///
/// so B, D = B^+ A^*A and v = B^+ A^*psi below live in the distinct-column
/// dimension u = |U|.  Multiplicity-expanded M x M views (fullB, ...) are kept
/// alongside for small batches; they agree with the compressed evolution by
/// the identity above.
struct SketchPSD {
  std::vector<std::uint64_t> indices;        ///< drawn indices, in draw order
  std::vector<std::uint64_t> uniqueIndices;  ///< sorted distinct indices U
  std::vector<double> counts;                ///< multiplicity of each U entry

  Eigen::MatrixXcd B;     ///< compressed kernel C H[U,U] C (Hermitian PSD)
  Eigen::MatrixXcd gram;  ///< compressed A^*A
  Eigen::MatrixXcd D;     ///< B^+ gram
  Eigen::VectorXcd v;     ///< B^+ A^* psi
  double pinvTolerance = 0.0;

  bool hasFullView = false;  ///< M x M diagnostics present (small batches)
  Eigen::MatrixXcd fullB;
  Eigen::MatrixXcd fullAstarA;
  Eigen::MatrixXcd fullD;
  Eigen::VectorXcd fullV;

  std::size_t sampleCount() const { return indices.size(); }
  std::size_t retained() const { return uniqueIndices.size(); }
};

namespace detail {

/// Scatters psi onto the candidate rows candidates[lo, hi).
inline Eigen::VectorXcd stateOnCandidates(
    const SparseState& psi, const std::vector<std::uint64_t>& candidates,
    std::size_t lo, std::size_t hi) {
  Eigen::VectorXcd out =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(hi - lo));
  const auto begin = candidates.begin() + static_cast<std::ptrdiff_t>(lo);
  const auto end = candidates.begin() + static_cast<std::ptrdiff_t>(hi);
  for (const Entry& e : psi.entries()) {
    const auto it = std::lower_bound(begin, end, e.index);
    if (it != end && *it == e.index)
      out(static_cast<Eigen::Index>(it - begin)) = e.value;
  }
  return out;
}

}  // namespace detail

/// Assembles the PSD sketch.  A^*A and A^*psi are accumulated block-by-block
/// over candidate rows (the union of the sampled columns' supports — all
/// other rows of A vanish), never materializing A itself: each block holds
/// the sampled columns of at most blockSize rows.  Peak memory is
/// O(u^2 + blockSize * u).
inline SketchPSD buildSketchPSD(const RowOracle& oracle,
                                const SampleBatch& batch,
                                const SparseState& psi,
                                std::size_t blockSize = 4096) {
  if (batch.kind != WeightKind::Diagonal)
    throw UsageError("buildSketchPSD requires a diagonal-weighted batch");
  if (!oracle.isPsd())
    throw UsageError("buildSketchPSD requires an oracle in a PSD mode");
  if (psi.qubits() != oracle.qubits())
    throw UsageError("buildSketchPSD: state/oracle qubit mismatch");
  if (blockSize < 1) throw UsageError("blockSize must be at least 1");
  if (batch.indices.empty()) throw UsageError("empty sample batch");

  SketchPSD sk;
  sk.indices = batch.indices;
  detail::UniqueCounts uc = detail::uniqueWithCounts(batch.indices);
  detail::checkUniqueBudget(uc.indices.size());
  sk.uniqueIndices = std::move(uc.indices);
  sk.counts = std::move(uc.counts);
  const std::size_t u = sk.uniqueIndices.size();
  const Eigen::Index ui = static_cast<Eigen::Index>(u);

  const std::vector<SparseRow> rows =
      detail::fetchRows(oracle, sk.uniqueIndices);
  std::vector<double> sqrtc(u);
  for (std::size_t a = 0; a < u; ++a) sqrtc[a] = std::sqrt(sk.counts[a]);

  // Compressed kernel: B_ab = sqrt(c_a c_b) H_{U_a, U_b}; diagonal kept real.
  sk.B.resize(ui, ui);
  for (std::size_t a = 0; a < u; ++a) {
    sk.B(a, a) = Complex(sk.counts[a] * rows[a].at(sk.uniqueIndices[a]).real(),
                         0.0);
    for (std::size_t b = a + 1; b < u; ++b) {
      const Complex val =
          sqrtc[a] * sqrtc[b] * rows[a].at(sk.uniqueIndices[b]);
      sk.B(a, b) = val;
      sk.B(b, a) = std::conj(val);
    }
  }

  // Candidate rows: union of the sampled columns' supports.
  std::vector<std::uint64_t> candidates;
  for (const SparseRow& r : rows)
    for (const Entry& e : r.entries()) candidates.push_back(e.index);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(ui, ui);
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(ui);
  Eigen::MatrixXcd R;
  for (std::size_t lo = 0; lo < candidates.size(); lo += blockSize) {
    const std::size_t hi = std::min(lo + blockSize, candidates.size());
    R = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(hi - lo), ui);
    const std::uint64_t rowLo = candidates[lo];
    const std::uint64_t rowHi = candidates[hi - 1];
    const auto begin = candidates.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto end = candidates.begin() + static_cast<std::ptrdiff_t>(hi);
    parallelForBlocks(u, 64, [&](std::size_t, std::size_t aLo,
                                 std::size_t aHi) {
      for (std::size_t a = aLo; a < aHi; ++a) {
        const auto& es = rows[a].entries();
        auto it = std::lower_bound(
            es.begin(), es.end(), rowLo,
            [](const Entry& e, std::uint64_t i) { return e.index < i; });
        for (; it != es.end() && it->index <= rowHi; ++it) {
          const auto pos = std::lower_bound(begin, end, it->index);
          R(static_cast<Eigen::Index>(pos - begin),
            static_cast<Eigen::Index>(a)) = sqrtc[a] * std::conj(it->value);
        }
      }
    });
    G.selfadjointView<Eigen::Lower>().rankUpdate(R.adjoint(), 1.0);
    w.noalias() += R.adjoint() * detail::stateOnCandidates(psi, candidates,
                                                           lo, hi);
  }
  sk.gram = G.selfadjointView<Eigen::Lower>();

  const double cutoffScale =
      static_cast<double>(std::max<std::size_t>(batch.indices.size(), 16));
  const HermitianPinv P = pinvHermitian(sk.B, cutoffScale);
  sk.pinvTolerance = P.cutoff;
  const double lambdaMax =
      P.eigenvalues.size() ? P.eigenvalues.maxCoeff() : 0.0;
  if (P.eigenvalues.size() &&
      P.eigenvalues.minCoeff() < -1e-10 * std::max(1.0, lambdaMax))
    throw DomainError(
        "sampled principal submatrix has a significantly negative "
        "eigenvalue; the operator tagged psd is not positive semidefinite");

  sk.D.noalias() = P.pinv * sk.gram;
  sk.v.noalias() = P.pinv * w;
  if (!sk.D.allFinite() || !sk.v.allFinite())
    throw NumericalError("buildSketchPSD produced non-finite D or v");

  if (batch.indices.size() <= kFullViewLimit) {
    sk.hasFullView = true;
    const Eigen::Index M = static_cast<Eigen::Index>(batch.indices.size());
    std::vector<std::size_t> pa(batch.indices.size());
    for (std::size_t j = 0; j < batch.indices.size(); ++j)
      pa[j] = detail::sortedPosition(sk.uniqueIndices, batch.indices[j]);
    sk.fullB.resize(M, M);
    sk.fullAstarA.resize(M, M);
    sk.fullV.resize(M);
    for (Eigen::Index j = 0; j < M; ++j) {
      const SparseRow& rj = rows[pa[static_cast<std::size_t>(j)]];
      sk.fullV(j) = dotRowState(rj, psi);
      for (Eigen::Index k = 0; k < M; ++k) {
        const std::size_t pk = pa[static_cast<std::size_t>(k)];
        sk.fullB(j, k) = rj.at(batch.indices[static_cast<std::size_t>(k)]);
        sk.fullAstarA(j, k) = dotRowConjRow(rj, rows[pk]);
      }
    }
    const HermitianPinv FP = pinvHermitian(sk.fullB, cutoffScale);
    sk.fullD.noalias() = FP.pinv * sk.fullAstarA;
    sk.fullV = (FP.pinv * sk.fullV).eval();
  }
  return sk;
}

}  // namespace hamsim
