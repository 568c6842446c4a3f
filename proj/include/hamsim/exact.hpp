#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/oracle.hpp"
#include "hamsim/pinv.hpp"
#include "hamsim/sketch_hermitian.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Largest qubit count the dense reference path accepts.
inline constexpr QubitCount kMaxExactQubits = 12;

/// Dense Hermitian matrix assembled row-by-row from an oracle; the reference
/// object every approximate result is measured against.
class DenseHermitian {
 public:
  static DenseHermitian fromOracle(const RowOracle& oracle) {
    if (oracle.qubits() > kMaxExactQubits)
      throw UsageError("dense reference limited to " +
                       std::to_string(kMaxExactQubits) + " qubits");
    const Eigen::Index N = static_cast<Eigen::Index>(oracle.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
      const SparseRow r = oracle.row(static_cast<std::uint64_t>(i));
      for (const Entry& e : r.entries())
        m(i, static_cast<Eigen::Index>(e.index)) = e.value;
    }
    return DenseHermitian(oracle.qubits(), std::move(m));
  }

  static DenseHermitian fromMatrix(QubitCount n, Eigen::MatrixXcd m) {
    if (n > kMaxExactQubits)
      throw UsageError("dense reference limited to " +
                       std::to_string(kMaxExactQubits) + " qubits");
    const Eigen::Index N = static_cast<Eigen::Index>(dimension(n));
    if (m.rows() != N || m.cols() != N)
      throw UsageError("matrix size does not match the qubit count");
    return DenseHermitian(n, std::move(m));
  }

  QubitCount qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  DenseHermitian(QubitCount n, Eigen::MatrixXcd m)
      : n_(n), m_(std::move(m)) {
    const double dev = (m_ - m_.adjoint().eval()).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-12))
      throw SymmetryError("matrix deviates from Hermitian symmetry by " +
                          std::to_string(dev));
  }

  QubitCount n_;
  Eigen::MatrixXcd m_;
};

/// exp(iHt) psi by Hermitian eigendecomposition: exactly unitary up to
/// rounding, which is what a ground-truth oracle must be.
inline Eigen::VectorXcd exactEvolve(const DenseHermitian& H,
                                    const Eigen::VectorXcd& psi, double t) {
  if (psi.size() != H.matrix().rows())
    throw UsageError("exactEvolve: state dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix());
  if (es.info() != Eigen::Success)
    throw NumericalError("exactEvolve: eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  Eigen::VectorXcd phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    phases(k) = std::exp(Complex(0.0, lam(k) * t));
  return es.eigenvectors() *
         (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

/// Dense operators materialized for invariant checks.
enum class ReconstructKind { HhatPsd, AAstar, Phat };

namespace detail {

inline Eigen::MatrixXcd hermitianSqrtPsd(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success)
    throw NumericalError("square root: eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lamMax = lam.size() ? lam.maxCoeff() : 0.0;
  if (lam.size() && lam.minCoeff() < -1e-10 * std::max(1.0, lamMax))
    throw DomainError("operator is not positive semidefinite");
  Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace detail

/// Nyström reconstruction Hhat = A B^+ A^* (kind HhatPsd) or the projection
/// Phat = (VS)^* (VS (VS)^*)^+ (VS) built from a Hermitian square root S of
/// PSD H (kind Phat), for a plain dense H of any size and a sampled index
/// list (repeats allowed).  Hhat = S Phat S^*, so Phat idempotent makes the
/// reconstruction a compressed projection of H.
inline Eigen::MatrixXcd denseReconstruct(ReconstructKind kind,
                                         const Eigen::MatrixXcd& H,
                                         const std::vector<std::uint64_t>& indices) {
  if (kind == ReconstructKind::AAstar)
    throw UsageError("AAstar reconstruction takes a Hermitian sketch");
  if (H.rows() != H.cols()) throw UsageError("H must be square");
  if (indices.empty()) throw UsageError("empty index list");
  if (indices.size() > kMaxSketchUnique)
    throw ResourceError("dense reconstruction limited to " +
                        std::to_string(kMaxSketchUnique) + " indices");
  const Eigen::Index N = H.rows();
  const Eigen::Index M = static_cast<Eigen::Index>(indices.size());
  for (const std::uint64_t i : indices)
    if (i >= static_cast<std::uint64_t>(N))
      throw UsageError("sampled index out of range");
  const double cutoffScale =
      static_cast<double>(std::max<std::size_t>(indices.size(), 16));

  if (kind == ReconstructKind::HhatPsd) {
    Eigen::MatrixXcd A(N, M);
    Eigen::MatrixXcd B(M, M);
    for (Eigen::Index j = 0; j < M; ++j)
      A.col(j) = H.col(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
    for (Eigen::Index j = 0; j < M; ++j)
      for (Eigen::Index k = 0; k < M; ++k)
        B(j, k) = H(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]),
                    static_cast<Eigen::Index>(indices[static_cast<std::size_t>(k)]));
    const HermitianPinv P = pinvHermitian(B, cutoffScale);
    return A * P.pinv * A.adjoint();
  }

  // Phat
  const Eigen::MatrixXcd S = detail::hermitianSqrtPsd(H);
  Eigen::MatrixXcd VS(M, N);
  for (Eigen::Index j = 0; j < M; ++j)
    VS.row(j) = S.row(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
  const Eigen::MatrixXcd G = VS * VS.adjoint();
  const HermitianPinv P = pinvHermitian(G, cutoffScale);
  return VS.adjoint() * P.pinv * VS;
}

/// AA^* materialized from a Hermitian sketch's scaled columns; its
/// expectation over batches is H^2.
inline Eigen::MatrixXcd denseReconstruct(ReconstructKind kind,
                                         const SketchHermitian& sketch,
                                         QubitCount n) {
  if (kind != ReconstructKind::AAstar)
    throw UsageError("this reconstruction form only materializes AAstar");
  if (n > 8) throw UsageError("AAstar materialization limited to 8 qubits");
  const Eigen::Index N = static_cast<Eigen::Index>(dimension(n));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
  Eigen::VectorXcd col(N);
  for (const std::vector<Entry>& sc : sketch.scaledColumns) {
    col.setZero();
    for (const Entry& e : sc)
      col(static_cast<Eigen::Index>(e.index)) = e.value;
    out.selfadjointView<Eigen::Lower>().rankUpdate(col, 1.0);
  }
  return out.selfadjointView<Eigen::Lower>();
}

}  // namespace hamsim
