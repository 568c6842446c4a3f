#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hamsim/hamsim.hpp"
#include "testutil.hpp"

namespace hamsim {
namespace {

using testutil::operatorNorm;
using testutil::randomHermitian;
using testutil::randomPsd;

HamiltonianStats userStats(double trace, double frobSq, double spec,
                           QubitCount n) {
  HamiltonianStats st;
  st.traceH = trace;
  st.frobSq = frobSq;
  st.specNorm = spec;
  st.n = n;
  st.source = StatsSource::UserBound;
  return st;
}

TEST(PlanPsd, FrozenOrderExample) {
  // t = 1, ||H|| = 1, eps = 0.01: K = ceil(e + ln 200) = 9.
  const EvolutionPlan plan =
      planPSD(userStats(1.0, 1.0, 1.0, 4), 1.0, 0.01, 0.1);
  EXPECT_EQ(plan.K, 9u);
  EXPECT_NEAR(plan.rawK, std::exp(1.0) + std::log(200.0), 1e-12);
}

TEST(PlanPsd, FrozenSampleCountExample) {
  // t = 1, tr H = 1, eps = 0.01, delta = 0.1:
  // M = ceil(max(405, 7200 ln 36000)) = 75538.
  const EvolutionPlan plan =
      planPSD(userStats(1.0, 1.0, 1.0, 4), 1.0, 0.01, 0.1);
  EXPECT_EQ(plan.M, 75538u);
  EXPECT_NEAR(plan.rawM, 7200.0 * std::log(36000.0), 1e-12 * plan.rawM);
}

TEST(PlanPsd, FloorBranchDominatesForLooseTargets) {
  // With eps = delta = 1 and tiny t the log branch goes negative and the
  // 405 tr H floor wins.
  const EvolutionPlan plan =
      planPSD(userStats(2.0, 4.0, 2.0, 4), 1e-3, 1.0, 1.0);
  EXPECT_EQ(plan.M, 810u);
  EXPECT_DOUBLE_EQ(plan.rawM, 810.0);
}

TEST(PlanPsd, RejectsNonPositiveTrace) {
  EXPECT_THROW(planPSD(userStats(0.0, 1.0, 1.0, 4), 1.0, 0.1, 0.1),
               DomainError);
  EXPECT_THROW(planPSD(userStats(-1.0, 1.0, 1.0, 4), 1.0, 0.1, 0.1),
               DomainError);
}

TEST(PlanHermitian, FrozenExample) {
  // t = 1, ||H|| = 1, ||H||_F^2 = 2, eps = delta = 0.1:
  // M = ceil(102400 ln 80), K = ceil(4 sqrt(1.1) + ln 80) = 9.
  const EvolutionPlan plan =
      planHermitian(userStats(0.0, 2.0, 1.0, 3), 1.0, 0.1, 0.1);
  EXPECT_EQ(plan.M, 448720u);
  EXPECT_EQ(plan.K, 9u);
  EXPECT_NEAR(plan.rawM, 102400.0 * std::log(80.0), 1e-12 * plan.rawM);
  EXPECT_NEAR(plan.rawK, 4.0 * std::sqrt(1.1) + std::log(80.0), 1e-12);
}

TEST(PlanHermitian, ZeroOperatorGetsMinimalPlanWithWarning) {
  const EvolutionPlan plan =
      planHermitian(userStats(0.0, 0.0, 0.0, 3), 1.0, 0.1, 0.1);
  EXPECT_EQ(plan.K, 1u);
  EXPECT_EQ(plan.M, 1u);
  ASSERT_FALSE(plan.warnings.empty());
  EXPECT_NE(plan.warnings[0].find("numerically zero"), std::string::npos);
}

TEST(PlanHermitian, ZeroSpecNormOnNonzeroOperatorRejected) {
  EXPECT_THROW(planHermitian(userStats(0.0, 2.0, 0.0, 3), 1.0, 0.1, 0.1),
               UsageError);
}

TEST(PlanHermitian, WarnsWhenLogFactorExceedsItsCap) {
  // ln(16/0.01) = 7.38 > 2 ln 2: the supplied norm bound is too small for
  // the dimension.
  const EvolutionPlan plan =
      planHermitian(userStats(0.0, 16.0, 0.1, 2), 1.0, 0.5, 0.5);
  bool found = false;
  for (const std::string& w : plan.warnings)
    found = found || w.find("n ln 2 cap") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(PlanHermitian, WarnsWhenSpecBoundExceedsFrobenius) {
  const EvolutionPlan plan =
      planHermitian(userStats(0.0, 16.0, 5.0, 2), 1.0, 0.5, 0.5);
  bool found = false;
  for (const std::string& w : plan.warnings)
    found = found || w.find("exceeds the Frobenius norm") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Plan, WarnsWhenSamplesExceedDimension) {
  const EvolutionPlan plan =
      planPSD(userStats(1.0, 1.0, 1.0, 2), 1.0, 0.01, 0.1);
  ASSERT_FALSE(plan.warnings.empty());
  EXPECT_NE(plan.warnings[0].find("exceeds the matrix dimension 2^n = 4"),
            std::string::npos);
}

TEST(Plan, InputValidation) {
  const HamiltonianStats st = userStats(1.0, 1.0, 1.0, 4);
  EXPECT_THROW(planPSD(st, 0.0, 0.1, 0.1), UsageError);
  EXPECT_THROW(planPSD(st, -1.0, 0.1, 0.1), UsageError);
  EXPECT_THROW(planPSD(st, 1.0, 0.0, 0.1), UsageError);
  EXPECT_THROW(planPSD(st, 1.0, 1.5, 0.1), UsageError);
  EXPECT_THROW(planPSD(st, 1.0, 0.1, 0.0), UsageError);
  EXPECT_THROW(planHermitian(st, 1.0, 0.1, 1.0 + 1e-9), UsageError);
  // Both boundaries of (0, 1] are legal.
  EXPECT_NO_THROW(planPSD(st, 1.0, 1.0, 1.0));
}

TEST(Plan, MonotoneInTimeAndAccuracy) {
  const HamiltonianStats psd = userStats(2.0, 4.0, 1.5, 6);
  const HamiltonianStats herm = userStats(0.0, 8.0, 1.5, 6);

  std::uint64_t lastK = 0;
  for (const double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const EvolutionPlan p = planPSD(psd, t, 0.1, 0.1);
    const EvolutionPlan h = planHermitian(herm, t, 0.1, 0.1);
    EXPECT_GE(p.K, lastK);
    EXPECT_GE(h.K, lastK);
    lastK = p.K;
  }

  std::uint64_t lastM = ~std::uint64_t{0};
  std::uint64_t lastMh = ~std::uint64_t{0};
  for (const double eps : {0.01, 0.05, 0.2, 0.5, 1.0}) {
    const EvolutionPlan p = planPSD(psd, 1.0, eps, 0.1);
    const EvolutionPlan h = planHermitian(herm, 1.0, eps, 0.1);
    EXPECT_LE(p.M, lastM) << "eps=" << eps;
    EXPECT_LE(h.M, lastMh) << "eps=" << eps;
    lastM = p.M;
    lastMh = h.M;
  }

  lastM = ~std::uint64_t{0};
  lastMh = ~std::uint64_t{0};
  for (const double delta : {0.01, 0.05, 0.2, 0.5, 1.0}) {
    const EvolutionPlan p = planPSD(psd, 1.0, 0.1, delta);
    const EvolutionPlan h = planHermitian(herm, 1.0, 0.1, delta);
    EXPECT_LE(p.M, lastM) << "delta=" << delta;
    EXPECT_LE(h.M, lastMh) << "delta=" << delta;
    lastM = p.M;
    lastMh = h.M;
  }

  lastK = 0;
  for (const double spec : {0.25, 0.5, 1.0, 2.0}) {
    const EvolutionPlan p = planPSD(userStats(2.0, 16.0, spec, 6), 1.0, 0.1,
                                    0.1);
    const EvolutionPlan h = planHermitian(userStats(0.0, 16.0, spec, 6), 1.0,
                                          0.1, 0.1);
    EXPECT_GE(p.K, lastK);
    EXPECT_GE(h.K, lastK);
    lastK = p.K;
  }
}

TEST(Plan, FormulaFidelity) {
  for (const double t : {0.3, 1.0, 2.5}) {
    for (const double eps : {0.02, 0.3}) {
      const double delta = 0.07;
      const double trH = 1.7, frobSq = 9.0, spec = 1.2;
      const EvolutionPlan p =
          planPSD(userStats(trH, frobSq, spec, 8), t, eps, delta);
      const double wantK = std::exp(1.0) * t * spec + std::log(2.0 / eps);
      const double wantM =
          std::max(405.0 * trH, (72.0 * trH * t / eps) *
                                    std::log(36.0 * trH * t / (eps * delta)));
      EXPECT_NEAR(p.rawK, wantK, 1e-12 * std::abs(wantK));
      EXPECT_NEAR(p.rawM, wantM, 1e-12 * std::abs(wantM));
      EXPECT_EQ(p.K, static_cast<std::uint64_t>(
                         std::max(1.0, std::ceil(p.rawK))));
      EXPECT_EQ(p.M, static_cast<std::uint64_t>(
                         std::max(1.0, std::ceil(p.rawM))));

      const EvolutionPlan h =
          planHermitian(userStats(0.0, frobSq, spec, 8), t, eps, delta);
      const double s2 = spec * spec;
      const double wantMh = 256.0 * std::pow(t, 4) * (1.0 + t * t * s2) *
                            frobSq * s2 / (eps * eps) *
                            std::log(4.0 * frobSq / (delta * s2));
      const double wantKh = 4.0 * t * std::sqrt(s2 + eps) +
                            std::log(4.0 * (1.0 + t * spec) / eps);
      EXPECT_NEAR(h.rawM, wantMh, 1e-12 * std::abs(wantMh));
      EXPECT_NEAR(h.rawK, wantKh, 1e-12 * std::abs(wantKh));
    }
  }
}

TEST(Plan, OverridesRecordedAndValidated) {
  EvolutionPlan plan = planPSD(userStats(1.0, 1.0, 1.0, 4), 1.0, 0.25, 0.25);
  applyPlanOverrides(plan, std::nullopt, 64);
  EXPECT_FALSE(plan.kOverride);
  EXPECT_TRUE(plan.mOverride);
  EXPECT_EQ(plan.M, 64u);
  applyPlanOverrides(plan, 3, std::nullopt);
  EXPECT_TRUE(plan.kOverride);
  EXPECT_EQ(plan.K, 3u);
  EXPECT_THROW(applyPlanOverrides(plan, 0, std::nullopt), UsageError);
  EXPECT_THROW(applyPlanOverrides(plan, std::nullopt, 0), UsageError);
}

TEST(Plan, TextEchoesDecisionsAndWarnings) {
  EvolutionPlan plan = planPSD(userStats(1.0, 1.0, 1.0, 2), 1.0, 0.01, 0.1);
  applyPlanOverrides(plan, 7, std::nullopt);
  plan.stats.specNormIsUpperBound = true;
  const std::string text = planText(plan);
  EXPECT_NE(text.find("mode: psd"), std::string::npos);
  EXPECT_NE(text.find("K: 7 (override)"), std::string::npos);
  EXPECT_NE(text.find("M: 75538"), std::string::npos);
  EXPECT_NE(text.find("(upper bound)"), std::string::npos);
  EXPECT_NE(text.find("source=user-supplied-bound"), std::string::npos);
  EXPECT_NE(text.find("warning: planned sample count"), std::string::npos);
}

TEST(EfficiencyCheckReport, MatchesHandComputedMass) {
  // diag(3, 1): mass = 10 - 16/2 = 2.
  const EfficiencyReport rep = efficiencyCheck(userStats(4.0, 10.0, 3.0, 1),
                                               3.0);
  EXPECT_DOUBLE_EQ(rep.shiftedMass, 2.0);
  EXPECT_TRUE(rep.pass);
  EXPECT_FALSE(efficiencyCheck(userStats(4.0, 10.0, 3.0, 1), 1.0).pass);

  // c I has zero shifted mass and passes any nonnegative budget.
  const double c = 0.75;
  const EfficiencyReport scaled =
      efficiencyCheck(userStats(8.0 * c, 8.0 * c * c, c, 3), 0.0);
  EXPECT_NEAR(scaled.shiftedMass, 0.0, 1e-12);
  EXPECT_TRUE(scaled.pass);

  EXPECT_FALSE(efficiencyCheck(userStats(0.0, 256.0, 1.0, 8), 8.0).pass);
}

TEST(ComputeStats, InverseDiagClosedForm) {
  const InverseDiagOracle oracle(2);
  for (const StatsMethod m : {StatsMethod::ExactDense, StatsMethod::Tree}) {
    const HamiltonianStats st = computeStats(oracle, m);
    EXPECT_NEAR(st.traceH, 25.0 / 12.0, 1e-12);
    EXPECT_NEAR(st.frobSq, 205.0 / 144.0, 1e-12);
    EXPECT_NEAR(st.specNorm, 1.0, 1e-9);
    EXPECT_FALSE(st.specNormIsUpperBound);
    EXPECT_EQ(st.n, 2u);
  }
  EXPECT_EQ(computeStats(oracle, StatsMethod::ExactDense).source,
            StatsSource::ExactDense);
  EXPECT_EQ(computeStats(oracle, StatsMethod::Tree).source,
            StatsSource::MarginalTree);
}

TEST(ComputeStats, SingleDiagonalEntry) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = Complex(5.0, 0.0);
  const ExplicitOracle oracle = ExplicitOracle::fromDense(2, Mode::Psd, m);
  for (const StatsMethod method : {StatsMethod::ExactDense,
                                   StatsMethod::Tree}) {
    const HamiltonianStats st = computeStats(oracle, method);
    EXPECT_NEAR(st.traceH, 5.0, 1e-12);
    EXPECT_NEAR(st.frobSq, 25.0, 1e-12);
    EXPECT_NEAR(st.specNorm, 5.0, 1e-9);
  }
}

TEST(ComputeStats, PowerIterationTracksDenseNorm) {
  const Eigen::MatrixXcd H = randomHermitian(8, /*seed=*/1);
  const ExplicitOracle oracle =
      ExplicitOracle::fromDense(3, Mode::Hermitian, H);
  const HamiltonianStats tree = computeStats(oracle, StatsMethod::Tree);
  const HamiltonianStats dense = computeStats(oracle, StatsMethod::ExactDense);
  ASSERT_FALSE(tree.specNormIsUpperBound);
  EXPECT_NEAR(tree.specNorm, dense.specNorm, 1e-5);
  EXPECT_NEAR(tree.specNorm, operatorNorm(H), 1e-5);
}

TEST(ComputeStats, NonConvergentIterationFallsBackToFrobeniusBound) {
  // This instance's two top eigenvalue magnitudes nearly tie with opposite
  // signs, which stalls plain power iteration; the certified upper bound
  // sqrt(frobSq) takes over and is flagged.
  const Eigen::MatrixXcd H = randomHermitian(8, /*seed=*/11);
  const ExplicitOracle oracle =
      ExplicitOracle::fromDense(3, Mode::Hermitian, H);
  const HamiltonianStats tree = computeStats(oracle, StatsMethod::Tree);
  ASSERT_TRUE(tree.specNormIsUpperBound);
  EXPECT_DOUBLE_EQ(tree.specNorm, std::sqrt(tree.frobSq));
  EXPECT_GE(tree.specNorm, operatorNorm(H) - 1e-9);
}

TEST(ComputeStats, TreeAgreesWithDenseOnModerateSizes) {
  // Well-gapped PSD instances: trace/Frobenius agree to rounding, the power
  // iteration to its residual target.
  const InverseDiagOracle invDiag(10);
  const HamiltonianStats a = computeStats(invDiag, StatsMethod::Tree);
  const HamiltonianStats b = computeStats(invDiag, StatsMethod::ExactDense);
  EXPECT_NEAR(a.traceH, b.traceH, 1e-9);
  EXPECT_NEAR(a.frobSq, b.frobSq, 1e-9);
  EXPECT_NEAR(a.specNorm, b.specNorm, 1e-9);

  const Eigen::MatrixXcd P = randomPsd(64, /*seed=*/29, /*trace=*/4.0);
  const ExplicitOracle psd = ExplicitOracle::fromDense(6, Mode::Psd, P);
  const HamiltonianStats c = computeStats(psd, StatsMethod::Tree);
  const HamiltonianStats d = computeStats(psd, StatsMethod::ExactDense);
  EXPECT_NEAR(c.traceH, d.traceH, 1e-9);
  EXPECT_NEAR(c.frobSq, d.frobSq, 1e-9);
  EXPECT_NEAR(c.specNorm, d.specNorm, 1e-9);
}

TEST(ComputeStats, ZeroOperatorYieldsZeroStats) {
  const ExplicitOracle zero =
      ExplicitOracle::fromDense(2, Mode::Psd, Eigen::MatrixXcd::Zero(4, 4));
  const HamiltonianStats st = computeStats(zero, StatsMethod::Tree);
  EXPECT_EQ(st.traceH, 0.0);
  EXPECT_EQ(st.frobSq, 0.0);
  EXPECT_EQ(st.specNorm, 0.0);
}

}  // namespace
}  // namespace hamsim
