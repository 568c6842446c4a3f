#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/exact.hpp"
#include "hamsim/numeric.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/sampler.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

// ---------------------------------------------------------------------------
// Summary statistics.
// ---------------------------------------------------------------------------

enum class StatsSource { ExactDense, MarginalTree, UserBound };

inline std::string to_string(StatsSource s) {
  switch (s) {
    case StatsSource::ExactDense: return "exact-dense";
    case StatsSource::MarginalTree: return "marginal-tree";
    case StatsSource::UserBound: return "user-supplied-bound";
  }
  return "?";
}

struct HamiltonianStats {
  double traceH = 0.0;
  double frobSq = 0.0;    ///< squared Frobenius norm
  double specNorm = 0.0;  ///< spectral norm, or a certified upper bound
  QubitCount n = 1;
  StatsSource source = StatsSource::MarginalTree;
  bool specNormIsUpperBound = false;
};

enum class StatsMethod { ExactDense, Tree };

namespace detail {

inline constexpr std::uint64_t kStatsSeed = 0x53744e6f726d3163ull;
inline constexpr std::size_t kPowerSupportBudget = std::size_t{1} << 22;
inline constexpr std::size_t kPowerDenseStartDim = std::size_t{1} << 14;

/// Power iteration for the spectral norm on row-oracle matvecs.  Starts from
/// a seeded pseudo-random vector (dense for small dimensions; for large ones,
/// scattered random indices plus heavy rows found by weight descent).  Sets
/// converged=false when 200 steps do not reach a 1e-6 relative residual or
/// the iterate support outgrows its budget.
inline double powerIterationNorm(const RowOracle& oracle, bool& converged) {
  converged = false;
  const std::uint64_t N = oracle.dim();

  std::vector<std::uint64_t> support;
  if (N <= kPowerDenseStartDim) {
    support.resize(N);
    for (std::uint64_t i = 0; i < N; ++i) support[i] = i;
  } else {
    for (std::uint64_t k = 0; k < 256; ++k) {
      const std::uint64_t bits = splitmix64At(kStatsSeed, k);
      support.push_back(bits % N);
    }
    SplitMix64 rng(deriveSeed(kStatsSeed, 0x64657363ull));
    for (int k = 0; k < 32; ++k) {
      try {
        support.push_back(
            samplePrefixDescent(oracle, WeightKind::SquaredRowNorm, rng).index);
      } catch (const DomainError&) {
        break;  // zero total weight; caller has already handled H = 0
      }
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
  }

  std::vector<Entry> x;
  x.reserve(support.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Complex val(2.0 * counterUniform(kStatsSeed, 2 * k + 1000) - 1.0,
                      2.0 * counterUniform(kStatsSeed, 2 * k + 1001) - 1.0);
    x.push_back({support[k], val});
    sq += std::norm(val);
  }
  if (!(sq > 0.0)) return 0.0;
  const double inv0 = 1.0 / std::sqrt(sq);
  for (Entry& e : x) e.value *= inv0;

  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const std::vector<Entry> y = applyOracleSparse(oracle, x);
    if (y.size() > kPowerSupportBudget) return 0.0;

    // Rayleigh quotient over the common support (x is unit-norm).
    NeumaierSum ray;
    {
      std::size_t ix = 0;
      for (const Entry& ey : y) {
        while (ix < x.size() && x[ix].index < ey.index) ++ix;
        if (ix == x.size()) break;
        if (x[ix].index == ey.index)
          ray.add((std::conj(x[ix].value) * ey.value).real());
      }
    }
    lambda = ray.value();

    // Residual ||y - lambda x|| over the union support.
    NeumaierSum res;
    {
      std::size_t ix = 0, iy = 0;
      while (ix < x.size() || iy < y.size()) {
        if (iy == y.size() || (ix < x.size() && x[ix].index < y[iy].index)) {
          res.add(std::norm(lambda * x[ix].value));
          ++ix;
        } else if (ix == x.size() || y[iy].index < x[ix].index) {
          res.add(std::norm(y[iy].value));
          ++iy;
        } else {
          res.add(std::norm(y[iy].value - lambda * x[ix].value));
          ++ix;
          ++iy;
        }
      }
    }
    if (std::abs(lambda) > 0.0 &&
        std::sqrt(res.value()) <= 1e-6 * std::abs(lambda)) {
      converged = true;
      return std::abs(lambda);
    }

    NeumaierSum ysq;
    for (const Entry& e : y) ysq.add(std::norm(e.value));
    if (!(ysq.value() > 0.0)) return 0.0;  // iterate fell into the kernel
    const double inv = 1.0 / std::sqrt(ysq.value());
    x = y;
    for (Entry& e : x) e.value *= inv;
  }
  return std::abs(lambda);
}

}  // namespace detail

/// Summary statistics of the operator: trace and squared Frobenius norm from
/// the weight trees' empty-prefix marginals, spectral norm by dense
/// eigendecomposition (exact-dense, n <= 12) or power iteration (tree).  A
/// non-convergent power iteration falls back to the certified upper bound
/// sqrt(frobSq) and flags it.
inline HamiltonianStats computeStats(const RowOracle& oracle,
                                     StatsMethod method) {
  HamiltonianStats st;
  st.n = oracle.qubits();
  if (method == StatsMethod::ExactDense) {
    const DenseHermitian H = DenseHermitian::fromOracle(oracle);
    st.source = StatsSource::ExactDense;
    st.traceH = H.matrix().trace().real();
    st.frobSq = H.matrix().squaredNorm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix());
    if (es.info() != Eigen::Success)
      throw NumericalError("computeStats: eigendecomposition failed");
    st.specNorm = es.eigenvalues().cwiseAbs().maxCoeff();
    return st;
  }
  st.source = StatsSource::MarginalTree;
  st.traceH = oracle.totalWeight(WeightKind::Diagonal);
  st.frobSq = oracle.totalWeight(WeightKind::SquaredRowNorm);
  if (!(st.frobSq > 0.0)) {
    st.specNorm = 0.0;
    return st;
  }
  bool converged = false;
  const double lam = detail::powerIterationNorm(oracle, converged);
  if (converged) {
    st.specNorm = lam;
  } else {
    st.specNorm = std::sqrt(st.frobSq);
    st.specNormIsUpperBound = true;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Evolution plans.
// ---------------------------------------------------------------------------

struct EvolutionPlan {
  Mode mode = Mode::Psd;
  double t = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t K = 1;
  std::uint64_t M = 1;
  double rawK = 0.0;  ///< formula right-hand side before ceiling
  double rawM = 0.0;
  double alpha = 0.0;  ///< trace shift folded into the run (0 when inactive)
  std::uint64_t seed = 0;
  HamiltonianStats stats;
  bool kOverride = false;
  bool mOverride = false;
  std::vector<std::string> warnings;
  int formulaVersion = 1;
};

namespace detail {

inline void checkPlanInputs(double t, double eps, double delta) {
  if (!(t > 0.0)) throw UsageError("plan requires t > 0");
  if (!(eps > 0.0) || eps > 1.0)
    throw UsageError("epsilon must lie in (0, 1]");
  if (!(delta > 0.0) || delta > 1.0)
    throw UsageError("delta must lie in (0, 1]");
}

inline void warnLargeM(EvolutionPlan& plan) {
  const double N = std::ldexp(1.0, static_cast<int>(plan.stats.n));
  if (static_cast<double>(plan.M) > N)
    plan.warnings.push_back(
        "planned sample count M = " + std::to_string(plan.M) +
        " exceeds the matrix dimension 2^n = " +
        std::to_string(static_cast<std::uint64_t>(N)) +
        "; the guarantee holds but the bound is loose");
}

}  // namespace detail

/// K and M for the PSD path:
///   K = ceil(e t ||H|| + ln(2/eps)),
///   M = ceil(max(405 tr H, (72 tr H t / eps) ln(36 tr H t / (eps delta)))).
inline EvolutionPlan planPSD(const HamiltonianStats& stats, double t,
                             double eps, double delta) {
  detail::checkPlanInputs(t, eps, delta);
  if (!(stats.traceH > 0.0))
    throw DomainError(
        "degenerate PSD plan: the trace must be positive (a zero operator "
        "needs no evolution)");
  EvolutionPlan plan;
  plan.mode = Mode::Psd;
  plan.t = t;
  plan.epsilon = eps;
  plan.delta = delta;
  plan.stats = stats;
  plan.rawK = std::exp(1.0) * t * stats.specNorm + std::log(2.0 / eps);
  plan.rawM = std::max(405.0 * stats.traceH,
                       (72.0 * stats.traceH * t / eps) *
                           std::log(36.0 * stats.traceH * t / (eps * delta)));
  plan.K = static_cast<std::uint64_t>(std::max(1.0, std::ceil(plan.rawK)));
  plan.M = static_cast<std::uint64_t>(std::max(1.0, std::ceil(plan.rawM)));
  detail::warnLargeM(plan);
  return plan;
}

/// K and M for the general Hermitian path (stats must describe the shifted
/// operator when the trace shift is active):
///   M = ceil(256 t^4 (1 + t^2 ||H||^2) ||H||_F^2 ||H||^2 / eps^2
///            * ln(4 ||H||_F^2 / (delta ||H||^2))),
///   K = ceil(4 t sqrt(||H||^2 + eps) + ln(4 (1 + t ||H||) / eps)).
inline EvolutionPlan planHermitian(const HamiltonianStats& stats, double t,
                                   double eps, double delta) {
  detail::checkPlanInputs(t, eps, delta);
  EvolutionPlan plan;
  plan.mode = Mode::Hermitian;
  plan.t = t;
  plan.epsilon = eps;
  plan.delta = delta;
  plan.stats = stats;
  if (!(stats.frobSq > 0.0)) {
    plan.K = 1;
    plan.M = 1;
    plan.rawK = 0.0;
    plan.rawM = 0.0;
    plan.warnings.push_back(
        "operator is numerically zero (possibly after the trace shift); "
        "using the minimal plan K = M = 1");
    return plan;
  }
  if (!(stats.specNorm > 0.0))
    throw UsageError(
        "spectral-norm bound must be positive for a nonzero operator");
  const double spec2 = stats.specNorm * stats.specNorm;
  plan.rawM = 256.0 * std::pow(t, 4) * (1.0 + t * t * spec2) * stats.frobSq *
              spec2 / (eps * eps) *
              std::log(4.0 * stats.frobSq / (delta * spec2));
  plan.rawK = 4.0 * t * std::sqrt(spec2 + eps) +
              std::log(4.0 * (1.0 + t * stats.specNorm) / eps);
  plan.K = static_cast<std::uint64_t>(std::max(1.0, std::ceil(plan.rawK)));
  plan.M = static_cast<std::uint64_t>(std::max(1.0, std::ceil(plan.rawM)));
  if (std::log(stats.frobSq / spec2) >
      static_cast<double>(stats.n) * std::log(2.0) + 1e-9)
    plan.warnings.push_back(
        "ln(frobSq/specNorm^2) exceeds its n ln 2 cap; the supplied "
        "spectral-norm bound underestimates the true norm");
  if (stats.specNorm > std::sqrt(stats.frobSq) + 1e-9)
    plan.warnings.push_back(
        "spectral-norm bound exceeds the Frobenius norm; statistics are "
        "inconsistent");
  detail::warnLargeM(plan);
  return plan;
}

/// Records user-forced K/M on top of a computed plan.
inline void applyPlanOverrides(EvolutionPlan& plan,
                               std::optional<std::uint64_t> K,
                               std::optional<std::uint64_t> M) {
  if (K) {
    if (*K < 1) throw UsageError("order override must be >= 1");
    plan.K = *K;
    plan.kOverride = true;
  }
  if (M) {
    if (*M < 1) throw UsageError("sample override must be >= 1");
    plan.M = *M;
    plan.mOverride = true;
  }
}

// ---------------------------------------------------------------------------
// Efficiency condition.
// ---------------------------------------------------------------------------

/// Shifted Frobenius mass ||H||_F^2 - tr(H)^2 / 2^n versus a user budget.
/// Informational only; never blocks a run.
struct EfficiencyReport {
  double shiftedMass = 0.0;
  double budget = 0.0;
  bool pass = false;
};

inline EfficiencyReport efficiencyCheck(const HamiltonianStats& stats,
                                        double budget) {
  EfficiencyReport rep;
  const double N = std::ldexp(1.0, static_cast<int>(stats.n));
  rep.shiftedMass =
      std::max(0.0, stats.frobSq - stats.traceH * stats.traceH / N);
  rep.budget = budget;
  rep.pass = rep.shiftedMass <= budget;
  return rep;
}

// ---------------------------------------------------------------------------
// Plan serialization (echoed by the CLI and embedded in result files).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string formatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline std::string planText(const EvolutionPlan& plan) {
  std::ostringstream os;
  os << "plan:\n"
     << "  mode: " << to_string(plan.mode) << "\n"
     << "  t: " << detail::formatDouble(plan.t) << "\n"
     << "  eps: " << detail::formatDouble(plan.epsilon) << "\n"
     << "  delta: " << detail::formatDouble(plan.delta) << "\n"
     << "  K: " << plan.K << (plan.kOverride ? " (override)" : "") << "\n"
     << "  M: " << plan.M << (plan.mOverride ? " (override)" : "") << "\n"
     << "  alpha: " << detail::formatDouble(plan.alpha) << "\n"
     << "  seed: " << plan.seed << "\n"
     << "  stats: trace=" << detail::formatDouble(plan.stats.traceH)
     << " frobSq=" << detail::formatDouble(plan.stats.frobSq)
     << " specNorm=" << detail::formatDouble(plan.stats.specNorm)
     << " n=" << plan.stats.n << " source=" << to_string(plan.stats.source)
     << (plan.stats.specNormIsUpperBound ? " (upper bound)" : "") << "\n"
     << "  formula-version: " << plan.formulaVersion << "\n";
  for (const std::string& w : plan.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

}  // namespace hamsim
