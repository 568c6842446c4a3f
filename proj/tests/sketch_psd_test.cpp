#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hamsim/hamsim.hpp"
#include "testutil.hpp"

namespace hamsim {
namespace {

using testutil::randomPsd;
using testutil::randomSparseState;

SampleBatch manualBatch(std::vector<std::uint64_t> indices,
                        std::vector<double> probabilities, double total,
                        WeightKind kind) {
  SampleBatch b;
  b.indices = std::move(indices);
  b.probabilities = std::move(probabilities);
  b.totalWeight = total;
  b.seed = 0;
  b.kind = kind;
  return b;
}

TEST(BuildSketchPSD, IdentityWithTwoDistinctDraws) {
  const Eigen::MatrixXcd I4 = Eigen::MatrixXcd::Identity(4, 4);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, I4);
  const SparseState psi(
      2, {{0, Complex(1.0 / std::sqrt(2.0), 0.0)},
          {2, Complex(0.0, 1.0 / std::sqrt(2.0))}});
  const SampleBatch batch =
      manualBatch({0, 1}, {0.25, 0.25}, 4.0, WeightKind::Diagonal);

  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  ASSERT_EQ(sk.sampleCount(), 2u);
  ASSERT_EQ(sk.retained(), 2u);
  EXPECT_EQ(sk.uniqueIndices, (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(sk.counts, (std::vector<double>{1.0, 1.0}));

  const Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_LT((sk.B - I2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((sk.gram - I2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((sk.D - I2).cwiseAbs().maxCoeff(), 1e-14);
  ASSERT_TRUE(sk.hasFullView);
  EXPECT_LT((sk.fullB - I2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((sk.fullAstarA - I2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((sk.fullD - I2).cwiseAbs().maxCoeff(), 1e-14);

  // v = B^+ A^* psi picks out the sampled amplitudes of psi.
  EXPECT_NEAR(std::abs(sk.v(0) - psi.amplitude(0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sk.v(1) - psi.amplitude(1)), 0.0, 1e-14);
}

TEST(BuildSketchPSD, RankOneRepeatedDrawCompresses) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2, 2);
  H(0, 0) = 2.0;
  const ExplicitOracle oracle = ExplicitOracle::fromDense(1, Mode::Psd, H);
  const SparseState psi = SparseState::basis(1, 0);
  const SampleBatch batch =
      manualBatch({0, 0}, {1.0, 1.0}, 2.0, WeightKind::Diagonal);

  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  ASSERT_EQ(sk.sampleCount(), 2u);
  ASSERT_EQ(sk.retained(), 1u);
  EXPECT_EQ(sk.counts, (std::vector<double>{2.0}));

  // Compressed kernel carries the multiplicity: B = c * H_00 = 4, and the
  // Gram matrix C A^*A C = c * |H[:,0]|^2 = 8, so D = 2.
  EXPECT_NEAR(std::abs(sk.B(0, 0) - Complex(4.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sk.gram(0, 0) - Complex(8.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sk.D(0, 0) - Complex(2.0, 0.0)), 0.0, 1e-13);

  // The multiplicity-expanded view shows the raw kernel.
  ASSERT_TRUE(sk.hasFullView);
  Eigen::MatrixXcd wantFullB(2, 2);
  wantFullB << Complex(2.0, 0.0), Complex(2.0, 0.0), Complex(2.0, 0.0),
      Complex(2.0, 0.0);
  EXPECT_LT((sk.fullB - wantFullB).cwiseAbs().maxCoeff(), 1e-14);

  // With the sampled column spanning the range, the reconstruction is exact.
  const Eigen::MatrixXcd Hhat =
      denseReconstruct(ReconstructKind::HhatPsd, H, batch.indices);
  EXPECT_LT((Hhat - H).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildSketchPSD, FullColumnSamplingReconstructsExactly) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/31, /*trace=*/2.0);
  std::vector<std::uint64_t> all(8);
  for (std::uint64_t i = 0; i < 8; ++i) all[i] = i;
  const Eigen::MatrixXcd Hhat =
      denseReconstruct(ReconstructKind::HhatPsd, H, all);
  EXPECT_LT((Hhat - H).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BuildSketchPSD, CompressedObjectsMatchDenseAlgebra) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/57, /*trace=*/2.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(3, Mode::Psd, H);
  const SparseState psi = randomSparseState(3, /*seed=*/5);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 40, 11);

  const SketchPSD sk = buildSketchPSD(oracle, batch, psi);
  const std::size_t u = sk.retained();
  ASSERT_GT(u, 0u);
  ASSERT_LT(u, 40u);  // repeats are certain with 40 draws over 8 leaves

  double countSum = 0.0;
  for (double c : sk.counts) countSum += c;
  EXPECT_DOUBLE_EQ(countSum, 40.0);
  for (std::size_t a = 1; a < u; ++a)
    EXPECT_LT(sk.uniqueIndices[a - 1], sk.uniqueIndices[a]);

  const Eigen::Index ui = static_cast<Eigen::Index>(u);
  Eigen::VectorXd sqrtc(ui);
  Eigen::MatrixXcd AU(8, ui);
  for (Eigen::Index a = 0; a < ui; ++a) {
    sqrtc(a) = std::sqrt(sk.counts[static_cast<std::size_t>(a)]);
    AU.col(a) = H.col(static_cast<Eigen::Index>(
        sk.uniqueIndices[static_cast<std::size_t>(a)]));
  }
  Eigen::MatrixXcd wantB(ui, ui);
  for (Eigen::Index a = 0; a < ui; ++a)
    for (Eigen::Index b = 0; b < ui; ++b)
      wantB(a, b) =
          sqrtc(a) * sqrtc(b) *
          H(static_cast<Eigen::Index>(
                sk.uniqueIndices[static_cast<std::size_t>(a)]),
            static_cast<Eigen::Index>(
                sk.uniqueIndices[static_cast<std::size_t>(b)]));
  EXPECT_LT((sk.B - wantB).cwiseAbs().maxCoeff(), 1e-12);

  const Eigen::MatrixXcd scaledA = AU * sqrtc.asDiagonal();
  EXPECT_LT((sk.gram - scaledA.adjoint() * scaledA).cwiseAbs().maxCoeff(),
            1e-12);

  const HermitianPinv P = pinvHermitian(
      wantB, static_cast<double>(std::max<std::size_t>(batch.indices.size(),
                                                       16)));
  EXPECT_LT((sk.D - P.pinv * scaledA.adjoint() * scaledA)
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  const Eigen::VectorXcd psiDense = testutil::toDense(psi);
  EXPECT_LT(
      (sk.v - P.pinv * scaledA.adjoint() * psiDense).cwiseAbs().maxCoeff(),
      1e-10);

  // Expanded views agree with per-draw dense algebra.
  ASSERT_TRUE(sk.hasFullView);
  const Eigen::Index M = static_cast<Eigen::Index>(batch.indices.size());
  Eigen::MatrixXcd Afull(8, M);
  for (Eigen::Index j = 0; j < M; ++j)
    Afull.col(j) = H.col(static_cast<Eigen::Index>(
        batch.indices[static_cast<std::size_t>(j)]));
  for (Eigen::Index j = 0; j < M; ++j)
    for (Eigen::Index k = 0; k < M; ++k)
      EXPECT_NEAR(
          std::abs(sk.fullB(j, k) -
                   H(static_cast<Eigen::Index>(
                         batch.indices[static_cast<std::size_t>(j)]),
                     static_cast<Eigen::Index>(
                         batch.indices[static_cast<std::size_t>(k)]))),
          0.0, 1e-12);
  EXPECT_LT((sk.fullAstarA - Afull.adjoint() * Afull).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(BuildSketchPSD, BlockSizeDoesNotChangeResults) {
  const Eigen::MatrixXcd H = randomPsd(8, /*seed=*/99, /*trace=*/1.5);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(3, Mode::Psd, H);
  const SparseState psi = randomSparseState(3, /*seed=*/12);
  const SampleBatch batch = drawBatch(oracle, WeightKind::Diagonal, 25, 4);

  const SketchPSD a = buildSketchPSD(oracle, batch, psi, /*blockSize=*/1);
  const SketchPSD b = buildSketchPSD(oracle, batch, psi);
  EXPECT_LT((a.B - b.B).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((a.gram - b.gram).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.D - b.D).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((a.v - b.v).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(BuildSketchPSD, RejectsWrongBatchKind) {
  const Eigen::MatrixXcd H = randomPsd(4, /*seed=*/3);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, H);
  const SparseState psi = SparseState::basis(2, 0);
  const SampleBatch batch =
      manualBatch({0}, {0.5}, 1.0, WeightKind::SquaredRowNorm);
  EXPECT_THROW(buildSketchPSD(oracle, batch, psi), UsageError);
}

TEST(BuildSketchPSD, RejectsHermitianModeOracle) {
  const Eigen::MatrixXcd H = testutil::randomHermitian(4, /*seed=*/3);
  const ExplicitOracle oracle =
      ExplicitOracle::fromDense(2, Mode::Hermitian, H);
  const SparseState psi = SparseState::basis(2, 0);
  const SampleBatch batch = manualBatch({0}, {0.5}, 1.0, WeightKind::Diagonal);
  EXPECT_THROW(buildSketchPSD(oracle, batch, psi), UsageError);
}

TEST(BuildSketchPSD, RejectsMismatchedStateEmptyBatchAndZeroBlock) {
  const Eigen::MatrixXcd H = randomPsd(4, /*seed=*/8);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, H);
  const SampleBatch batch = manualBatch({0}, {0.5}, 1.0, WeightKind::Diagonal);
  EXPECT_THROW(buildSketchPSD(oracle, batch, SparseState::basis(3, 0)),
               UsageError);
  const SampleBatch empty = manualBatch({}, {}, 1.0, WeightKind::Diagonal);
  EXPECT_THROW(buildSketchPSD(oracle, empty, SparseState::basis(2, 0)),
               UsageError);
  EXPECT_THROW(
      buildSketchPSD(oracle, batch, SparseState::basis(2, 0), /*blockSize=*/0),
      UsageError);
}

TEST(BuildSketchPSD, DetectsIndefiniteOperatorTaggedPsd) {
  // Positive diagonal but eigenvalues {3, -1}: passes the load-time diagonal
  // check, fails once the sampled principal submatrix is factored.
  Eigen::MatrixXcd H(2, 2);
  H << Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(2.0, 0.0),
      Complex(1.0, 0.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(1, Mode::Psd, H);
  const SparseState psi = SparseState::basis(1, 0);
  const SampleBatch batch =
      manualBatch({0, 1}, {0.5, 0.5}, 2.0, WeightKind::Diagonal);
  EXPECT_THROW(buildSketchPSD(oracle, batch, psi), DomainError);
}

TEST(BuildSketchPSD, DistinctIndexBudgetEnforced) {
  const InverseDiagOracle oracle(12);  // dimension 4096
  std::vector<std::uint64_t> idx(kMaxSketchUnique + 1);
  std::vector<double> probs(idx.size(), 1.0 / 4096.0);
  for (std::size_t j = 0; j < idx.size(); ++j)
    idx[j] = static_cast<std::uint64_t>(j);
  const SampleBatch batch =
      manualBatch(std::move(idx), std::move(probs), 1.0, WeightKind::Diagonal);
  EXPECT_THROW(buildSketchPSD(oracle, batch, SparseState::basis(12, 0)),
               ResourceError);
}

}  // namespace
}  // namespace hamsim
