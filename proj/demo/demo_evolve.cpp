// Minimal end-to-end use of the library: build an 8-qubit PSD Hamiltonian,
// plan (K, M) from its statistics, sample a row sketch, evolve |0>, and
// compare a few amplitudes against the dense reference.

#include <cstdio>
#include <memory>

#include "hamsim/hamsim.hpp"

int main() {
  using namespace hamsim;

  const QubitCount n = 8;
  const std::unique_ptr<RowOracle> oracle =
      builtinHamiltonian("inverse-diag", n);
  const SparseState psi = SparseState::basis(n, 0);
  const double t = 1.0;

  const HamiltonianStats stats = computeStats(*oracle, StatsMethod::Tree);
  const EvolutionPlan plan = planPSD(stats, t, /*eps=*/0.25, /*delta=*/0.2);
  std::printf("planned K = %llu, M = %llu (trace %.3f, norm %.3f)\n",
              static_cast<unsigned long long>(plan.K),
              static_cast<unsigned long long>(plan.M), stats.traceH,
              stats.specNorm);

  const SampleBatch batch =
      drawBatch(*oracle, WeightKind::Diagonal, plan.M, /*seed=*/1);
  const SketchPSD sketch = buildSketchPSD(*oracle, batch, psi);
  const EvolvedState evolved = evolvePSD(sketch, psi, t, plan.K, *oracle);

  const DenseHermitian dense = DenseHermitian::fromOracle(*oracle);
  Eigen::VectorXcd psiDense = Eigen::VectorXcd::Zero(1 << n);
  psiDense(0) = 1.0;
  const Eigen::VectorXcd truth = exactEvolve(dense, psiDense, t);

  for (std::uint64_t i : {0ull, 1ull, 2ull}) {
    const Complex a = evolved.amplitude(i);
    const Complex b = truth(static_cast<Eigen::Index>(i));
    std::printf("amp[%llu] = %+.6f%+.6fi   exact %+.6f%+.6fi\n",
                static_cast<unsigned long long>(i), a.real(), a.imag(),
                b.real(), b.imag());
  }
  std::printf("l2 error vs dense reference: %.3e\n",
              (evolved.materializeDense() - truth).norm());
  return 0;
}
