#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "hamsim/types.hpp"

namespace hamsim {

/// Pseudoinverse of a Hermitian matrix via eigendecomposition, with the
/// spectrum and cutoff kept for diagnostics.
struct HermitianPinv {
  Eigen::MatrixXcd pinv;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXcd vectors;     // columns are eigenvectors
  double cutoff = 0.0;          // |lambda| <= cutoff treated as zero
  Eigen::Index rank = 0;
};

/// Computes B^+ with the relative cutoff `cutoffScale * eps * max|lambda|`.
/// Pass cutoffScale = max(M, 16) so the zeroing policy matches the sample
/// count M the matrix represents (B may be a compressed u x u core standing
/// in for an M x M object with the same nonzero spectrum).
inline HermitianPinv pinvHermitian(const Eigen::MatrixXcd& B,
                                   double cutoffScale) {
  if (B.rows() != B.cols())
    throw UsageError("pinvHermitian: matrix must be square");
  if (!B.allFinite())
    throw NumericalError("pinvHermitian: non-finite input entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(B);
  if (eig.info() != Eigen::Success)
    throw NumericalError("pinvHermitian: eigendecomposition failed");

  HermitianPinv out;
  out.eigenvalues = eig.eigenvalues();
  out.vectors = eig.eigenvectors();
  const double maxAbs =
      out.eigenvalues.size() == 0 ? 0.0 : out.eigenvalues.cwiseAbs().maxCoeff();
  out.cutoff = std::max(cutoffScale, 1.0) *
               std::numeric_limits<double>::epsilon() * maxAbs;

  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(out.eigenvalues.size());
  for (Eigen::Index k = 0; k < out.eigenvalues.size(); ++k) {
    if (std::abs(out.eigenvalues[k]) > out.cutoff) {
      inverted[k] = 1.0 / out.eigenvalues[k];
      ++out.rank;
    }
  }
  out.pinv = out.vectors * inverted.asDiagonal() * out.vectors.adjoint();
  return out;
}

}  // namespace hamsim
