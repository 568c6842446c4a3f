#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hamsim/hamsim.hpp"
#include "testutil.hpp"

namespace hamsim {
namespace {

using testutil::operatorNorm;
using testutil::randomPsd;
using testutil::randomSparseState;
using testutil::toDense;

SampleBatch manualBatch(std::vector<std::uint64_t> indices,
                        std::vector<double> probabilities, double total) {
  SampleBatch b;
  b.indices = std::move(indices);
  b.probabilities = std::move(probabilities);
  b.totalWeight = total;
  b.seed = 0;
  b.kind = WeightKind::Diagonal;
  return b;
}

/// g_K(D) v evaluated as the explicit polynomial sum_{k=1}^K (it)^k D^{k-1}/k!.
Eigen::VectorXcd explicitPolynomial(const Eigen::MatrixXcd& D,
                                    const Eigen::VectorXcd& v, double t,
                                    std::uint64_t K) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(v.size());
  Eigen::VectorXcd power = v;  // D^{k-1} v
  Complex coef(1.0, 0.0);
  const Complex it(0.0, t);
  for (std::uint64_t k = 1; k <= K; ++k) {
    coef *= it / static_cast<double>(k);
    acc += coef * power;
    if (k < K) power = (D * power).eval();
  }
  return acc;
}

TEST(EvolvePSD, TimeZeroReturnsInputExactly) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/21, /*trace=*/2.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(3, Mode::Psd, H);
  const SparseState psi = randomSparseState(3, /*seed=*/2);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 20, 7);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  const EvolvedState out = evolvePSD(sk, psi, 0.0, 5, oracle);
  for (std::uint64_t i = 0; i < 8; ++i)
    EXPECT_EQ(out.amplitude(i), psi.amplitude(i));
}

TEST(EvolvePSD, RankOneProjectorGainsPhase) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(4, 4);
  H(0, 0) = 2.0;
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, H);
  const SparseState psi = SparseState::basis(2, 0);
  const SampleBatch batch = manualBatch({0, 0}, {1.0, 1.0}, 2.0);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  const EvolvedState out = evolvePSD(sk, psi, 1.0, 30, oracle);

  const Complex want = std::polar(1.0, 2.0);  // exp(2i)
  EXPECT_NEAR(std::abs(out.amplitude(0) - want), 0.0, 1e-10);
  for (std::uint64_t k = 1; k < 4; ++k)
    EXPECT_EQ(out.amplitude(k), Complex(0.0, 0.0));
}

TEST(EvolvePSD, OrderZeroRejected) {
  const Eigen::MatrixXcd H = randomPsd(4, /*seed=*/6);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, H);
  const SparseState psi = SparseState::basis(2, 0);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 5, 1);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  EXPECT_THROW(taylorRecurrencePSD(sk, 1.0, 0), UsageError);
  EXPECT_THROW(evolvePSD(sk, psi, 1.0, 0, oracle), UsageError);
}

TEST(EvolvePSD, RecurrenceMatchesExplicitPolynomial) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/44, /*trace=*/2.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(3, Mode::Psd, H);
  const SparseState psi = randomSparseState(3, /*seed=*/9);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 25, 3);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);

  for (const std::uint64_t K : {1u, 2u, 9u}) {
    const TaylorStatePSD st = taylorRecurrencePSD(sk, 0.7, K);
    EXPECT_EQ(st.stage, K - 1);
    const Eigen::VectorXcd want = explicitPolynomial(sk.D, sk.v, 0.7, K);
    EXPECT_LT((st.b - want).cwiseAbs().maxCoeff(), 1e-13) << "K=" << K;
  }
}

TEST(EvolvePSD, WeightsCarrySqrtCounts) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/13, /*trace=*/1.5);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(3, Mode::Psd, H);
  const SparseState psi = randomSparseState(3, /*seed=*/1);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 30, 17);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);

  const TaylorStatePSD st = taylorRecurrencePSD(sk, 1.2, 8);
  const EvolvedState out = evolvePSD(sk, psi, 1.2, 8, oracle);
  ASSERT_EQ(out.columnIndices(), sk.uniqueIndices);
  for (Eigen::Index a = 0; a < st.b.size(); ++a) {
    const Complex want =
        std::sqrt(sk.counts[static_cast<std::size_t>(a)]) * st.b(a);
    EXPECT_NEAR(std::abs(out.columnWeights()(a) - want), 0.0, 1e-14);
  }
  EXPECT_EQ(out.rowCoeff(), Complex(0.0, 0.0));
}

TEST(EvolvePSD, TruncationErrorWithinStirlingBound) {
  Eigen::MatrixXcd H = randomPsd(16, /*seed=*/70, /*trace=*/2.0);
  H *= 0.9 / operatorNorm(H);  // spectral norm 0.9
  const ExplicitOracle oracle = ExplicitOracle::fromDense(4, Mode::Psd, H);
  const SparseState psi = randomSparseState(4, /*seed=*/3);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 60, 29);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);

  const Eigen::MatrixXcd Hhat =
      denseReconstruct(ReconstructKind::HhatPsd, H, batch.indices);
  const double hatNorm = operatorNorm(Hhat);
  const double t = 1.0;
  const Eigen::VectorXcd ref =
      evolvePSD(sk, psi, t, 200, oracle).materializeDense();
  for (std::uint64_t K = 1; K <= 30; ++K) {
    const Eigen::VectorXcd approx =
        evolvePSD(sk, psi, t, K, oracle).materializeDense();
    const double diff = (approx - ref).norm();
    const double logBound = std::log(2.0) +
                            (static_cast<double>(K) + 1.0) *
                                std::log(t * hatNorm) -
                            std::lgamma(static_cast<double>(K) + 2.0);
    EXPECT_LE(diff, std::exp(logBound) + 1e-14) << "K=" << K;
  }
}

TEST(EvolvePSD, FullSamplingHighOrderRecoversExactEvolution) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/23, /*trace=*/2.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(3, Mode::Psd, H);
  const SparseState psi = randomSparseState(3, /*seed=*/8);
  std::vector<std::uint64_t> all(8);
  std::vector<double> probs(8, 0.125);
  for (std::uint64_t i = 0; i < 8; ++i) all[i] = i;
  const SketchPSD sk =
      buildSketchPSD(oracle, manualBatch(std::move(all), std::move(probs),
                                         H.trace().real()),
                     psi);

  const double t = 1.0;
  const EvolvedState out = evolvePSD(sk, psi, t, 200, oracle);
  const Eigen::VectorXcd exact =
      exactEvolve(DenseHermitian::fromMatrix(3, H), toDense(psi), t);
  EXPECT_LT((out.materializeDense() - exact).norm(), 1e-8);
  EXPECT_NEAR(out.norm(), 1.0, 1e-8);
}

TEST(EvolvePSD, PushThroughMatchesDenseTruncatedSeries) {
  const Eigen::MatrixXcd H = randomPsd(16, /*seed=*/85, /*trace=*/2.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(4, Mode::Psd, H);
  const SparseState psi = randomSparseState(4, /*seed=*/6);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 30, 41);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);

  const Eigen::MatrixXcd Hhat =
      denseReconstruct(ReconstructKind::HhatPsd, H, batch.indices);
  const double t = 0.8;
  const std::uint64_t K = 18;

  // Dense side: (sum_{k=1}^K (it Hhat)^k / k!) psi, built by Horner.
  const Eigen::VectorXcd psiDense = toDense(psi);
  Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(16);
  Eigen::VectorXcd power = psiDense;
  Complex coef(1.0, 0.0);
  for (std::uint64_t k = 1; k <= K; ++k) {
    coef *= Complex(0.0, t) / static_cast<double>(k);
    power = (Hhat * power).eval();
    dense += coef * power;
  }

  const Eigen::VectorXcd viaSketch =
      evolvePSD(sk, psi, t, K, oracle).materializeDense() - psiDense;
  EXPECT_LT((viaSketch - dense).norm(), 1e-8);
}

TEST(EvolvePSD, NonFiniteRecurrenceNamesTheStage) {
  SketchPSD sk;
  sk.indices = {0};
  sk.uniqueIndices = {0};
  sk.counts = {1.0};
  sk.B = Eigen::MatrixXcd::Identity(1, 1);
  sk.gram = Eigen::MatrixXcd::Identity(1, 1);
  sk.D = Eigen::MatrixXcd::Constant(
      1, 1, Complex(std::numeric_limits<double>::infinity(), 0.0));
  sk.v = Eigen::VectorXcd::Ones(1);
  try {
    taylorRecurrencePSD(sk, 1.0, 3);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 1"), std::string::npos);
  }
}

TEST(EvolvePSD, QubitMismatchRejected) {
  const Eigen::MatrixXcd H = randomPsd(4, /*seed=*/2);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, H);
  const SparseState psi = SparseState::basis(2, 0);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 5, 1);
  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  EXPECT_THROW(evolvePSD(sk, SparseState::basis(3, 0), 1.0, 5, oracle),
               UsageError);
}

}  // namespace
}  // namespace hamsim
