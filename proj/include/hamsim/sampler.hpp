#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hamsim/numeric.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/parallel.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// One sampled row index and its exact sampling probability.
struct DrawResult {
  std::uint64_t index = 0;
  double probability = 0.0;
};

/// M row indices drawn i.i.d. (with repetition) from the weight-kind
/// distribution, plus everything needed to reproduce or rescale them.
struct SampleBatch {
  std::vector<std::uint64_t> indices;
  std::vector<double> probabilities;  // p(t_j) = weight(t_j) / totalWeight
  double totalWeight = 0.0;
  std::uint64_t seed = 0;
  WeightKind kind = WeightKind::Diagonal;

  std::uint64_t size() const { return indices.size(); }
};

namespace detail {

inline void checkSamplingSetup(const RowOracle& oracle, WeightKind kind) {
  if (kind == WeightKind::Diagonal && !oracle.isPsd())
    throw DomainError(
        "diagonal sampling weights are only valid for PSD-mode oracles");
}

inline double checkedTotalWeight(const RowOracle& oracle, WeightKind kind) {
  const double total = oracle.totalWeight(kind);
  if (std::isnan(total))
    throw OracleFaultError("total " + to_string(kind) + " weight is NaN");
  if (!(total > 0.0))
    throw DegenerateWeightError("total " + to_string(kind) + " weight " +
                                std::to_string(total) +
                                " is not positive; H = 0 has no sampling "
                                "distribution");
  return total;
}

}  // namespace detail

/// Deterministic core of the prefix-descent sampler: maps u in [0, 1) to a
/// leaf by inverse CDF.  Descends n levels; at each level evaluates the left
/// child's marginal only (exactly n marginal evaluations total), goes left
/// when q < w(L||0) and right otherwise, subtracting w(L||0) from q.  The
/// residual mass is tracked with compensated arithmetic so deep descents do
/// not drift, and a zero-mass guard keeps fp slack from steering the walk
/// into a weightless subtree.
inline DrawResult descendAt(const RowOracle& oracle, WeightKind kind,
                            double u) {
  detail::checkSamplingSetup(oracle, kind);
  const double total = detail::checkedTotalWeight(oracle, kind);
  const unsigned n = oracle.qubits();

  NeumaierSum q;  // position within the residual block
  q.add(u * total);
  double residual = total;  // mass of the current prefix block
  Prefix prefix;
  for (unsigned level = 0; level < n; ++level) {
    const Prefix left = prefix.child(0);
    double wLeft = oracle.marginal(left, kind);
    if (std::isnan(wLeft) || wLeft < 0.0)
      throw OracleFaultError("marginal at prefix '" + left.str() + "' is " +
                             std::to_string(wLeft));
    if (wLeft > residual) {
      if (wLeft > residual + 1e-6 * total)
        throw OracleFaultError("marginal at prefix '" + left.str() +
                               "' exceeds its parent's mass");
      wLeft = residual;  // floating-point slack
    }
    const double wRight = residual - wLeft;
    const bool goRight = !(q.value() < wLeft) && wRight > 0.0;
    if (goRight) {
      q.add(-wLeft);
      residual = wRight;
    } else {
      residual = wLeft;
    }
    prefix = prefix.child(goRight ? 1 : 0);
  }
  // Leaf weights equal full-length marginals exactly (oracle contract), so
  // reading the leaf directly gives the exact probability and keeps the
  // marginal-evaluation count at n per draw.
  const double w = kind == WeightKind::Diagonal
                       ? oracle.diag(prefix.bits)
                       : oracle.rowSqNorm(prefix.bits);
  if (!(w > 0.0))
    throw OracleFaultError("descent reached zero-weight leaf " +
                           std::to_string(prefix.bits) +
                           " (inconsistent marginals)");
  return {prefix.bits, w / total};
}

/// Single draw from a sequential random source.
inline DrawResult samplePrefixDescent(const RowOracle& oracle, WeightKind kind,
                                      SplitMix64& rng) {
  return descendAt(oracle, kind, rng.nextDouble());
}

/// M independent draws.  Each draw j uses the keyed uniform (seed, j), so
/// batches are deterministic in `seed` and independent of worker scheduling.
inline SampleBatch drawBatch(const RowOracle& oracle, WeightKind kind,
                             std::uint64_t M, std::uint64_t seed) {
  if (M < 1) throw UsageError("drawBatch: sample count must be >= 1");
  detail::checkSamplingSetup(oracle, kind);
  detail::checkedTotalWeight(oracle, kind);  // fail fast before spawning work

  SampleBatch batch;
  batch.indices.resize(M);
  batch.probabilities.resize(M);
  batch.totalWeight = oracle.totalWeight(kind);
  batch.seed = seed;
  batch.kind = kind;
  parallelForBlocks(M, 8192, [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t j = b; j < e; ++j) {
      const DrawResult r = descendAt(oracle, kind, counterUniform(seed, j));
      batch.indices[j] = r.index;
      batch.probabilities[j] = r.probability;
    }
  });
  return batch;
}

}  // namespace hamsim
