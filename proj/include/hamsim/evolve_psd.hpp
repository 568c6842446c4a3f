#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/oracle.hpp"
#include "hamsim/sketch_psd.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/state_handle.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// State of the truncated-exponential recurrence
///   b_0 = (it)^K / K! * v,
///   b_j = (it)^{K-j} / (K-j)! * v + D b_{j-1},   j = 1..K-1,
/// whose final vector satisfies b_{K-1} = g_K(D) v with
/// g_K(x) = sum_{k=1}^{K} (it)^k x^{k-1} / k!.
struct TaylorStatePSD {
  Eigen::VectorXcd b;
  std::uint64_t stage = 0;  ///< last completed stage, in [0, K-1]
};

/// Runs the recurrence to completion: K-1 multiplications by D, O(u^2) each.
/// Scalar coefficients are built by incremental multiplication, so K may
/// exceed the overflow point of explicit factorials.
inline TaylorStatePSD taylorRecurrencePSD(const SketchPSD& sketch, double t,
                                          std::uint64_t K) {
  if (K < 1) throw UsageError("PSD evolution requires truncation order >= 1");
  std::vector<Complex> coef(K + 1);
  coef[0] = Complex(1.0, 0.0);
  const Complex it(0.0, t);
  for (std::uint64_t m = 1; m <= K; ++m)
    coef[m] = coef[m - 1] * it / static_cast<double>(m);

  TaylorStatePSD st;
  st.b = coef[K] * sketch.v;
  st.stage = 0;
  if (!st.b.allFinite())
    throw NumericalError("PSD recurrence produced non-finite state at stage 0");
  for (std::uint64_t j = 1; j < K; ++j) {
    st.b = (coef[K - j] * sketch.v + sketch.D * st.b).eval();
    st.stage = j;
    if (!st.b.allFinite())
      throw NumericalError("PSD recurrence produced non-finite state at stage " +
                           std::to_string(j));
  }
  return st;
}

/// psihat(t) = psi + A b_{K-1}, exposed lazily: amplitude i costs one row
/// fetch plus an O(u) merge.  t = 0 returns psi exactly (every coefficient
/// vanishes).
inline EvolvedState evolvePSD(const SketchPSD& sketch, const SparseState& psi,
                              double t, std::uint64_t K,
                              const RowOracle& oracle) {
  if (psi.qubits() != oracle.qubits())
    throw UsageError("evolvePSD: state/oracle qubit mismatch");
  const TaylorStatePSD st = taylorRecurrencePSD(sketch, t, K);
  Eigen::VectorXcd weights(st.b.size());
  for (Eigen::Index a = 0; a < st.b.size(); ++a)
    weights(a) =
        std::sqrt(sketch.counts[static_cast<std::size_t>(a)]) * st.b(a);
  return EvolvedState(oracle, psi, sketch.uniqueIndices, std::move(weights),
                      Complex(0.0, 0.0));
}

}  // namespace hamsim
