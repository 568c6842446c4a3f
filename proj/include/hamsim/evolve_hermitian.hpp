#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "hamsim/oracle.hpp"
#include "hamsim/series.hpp"
#include "hamsim/sketch_hermitian.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/state_handle.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Evolves psi under a general Hermitian H through the sketch:
///
///   psihat(t) = psi + it (H psi) + t^2 A f_K(t^2 A^*A) v + i t^3 A g_K(t^2 A^*A) z
///
/// with f(x) = (cos sqrt(x) - 1)/x, g(x) = (sin sqrt(x) - sqrt(x))/x^{3/2}
/// truncated at order K (K = 0 keeps the constant terms -1/2, -1/6).  The
/// scalar t^2 is folded into the Gram matrix once; each series costs exactly
/// K multiplications by it.  t = 0 returns psi exactly.
inline EvolvedState evolveHermitian(const SketchHermitian& sketch,
                                    const SparseState& psi, double t,
                                    std::uint64_t K, const RowOracle& oracle) {
  if (psi.qubits() != oracle.qubits())
    throw UsageError("evolveHermitian: state/oracle qubit mismatch");
  const Eigen::MatrixXcd W = (t * t) * sketch.B;
  const Eigen::VectorXcd p1 =
      evalSeries(TruncatedSeries::cosRemainder(K), W, sketch.v);
  const Eigen::VectorXcd p2 =
      evalSeries(TruncatedSeries::sinRemainder(K), W, sketch.z);

  const double t2 = t * t;
  const Complex it3(0.0, t2 * t);
  Eigen::VectorXcd weights(p1.size());
  for (Eigen::Index a = 0; a < p1.size(); ++a)
    weights(a) = sketch.scales[static_cast<std::size_t>(a)] *
                 (t2 * p1(a) + it3 * p2(a));
  return EvolvedState(oracle, psi, sketch.uniqueIndices, std::move(weights),
                      Complex(0.0, t));
}

}  // namespace hamsim
