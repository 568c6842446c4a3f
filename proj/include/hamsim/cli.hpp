#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/coo.hpp"
#include "hamsim/evolve_hermitian.hpp"
#include "hamsim/evolve_psd.hpp"
#include "hamsim/exact.hpp"
#include "hamsim/families.hpp"
#include "hamsim/io.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/plan.hpp"
#include "hamsim/sampler.hpp"
#include "hamsim/shift.hpp"
#include "hamsim/sketch_hermitian.hpp"
#include "hamsim/sketch_psd.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/state_handle.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

// ---------------------------------------------------------------------------
// Argument bundles (flag parsing lives in the binary; everything testable
// lives here).
// ---------------------------------------------------------------------------

struct EvolveArgs {
  std::optional<std::string> hamiltonianPath;
  std::optional<std::string> family;
  std::optional<QubitCount> n;
  FamilyParams familyParams;

  std::optional<std::string> statePath;
  std::optional<std::uint64_t> basis;

  Mode mode = Mode::Psd;
  double t = 0.0;
  double eps = 0.1;
  double delta = 0.1;
  std::optional<std::uint64_t> samplesOverride;
  std::optional<std::uint64_t> orderOverride;
  std::uint64_t seed = 0;
  bool noTraceShift = false;

  std::vector<std::string> amplitudeTokens;
  bool fullState = false;
  bool exact = false;
  std::size_t blockSize = 4096;
};

struct SweepArgs {
  EvolveArgs base;
  std::string axis;  ///< "M", "K", or "t"
  double gridFrom = 0.0;
  double gridTo = 0.0;
  std::uint64_t gridSteps = 0;
  std::optional<std::string> gridScale;  ///< "linear" | "geometric"
  std::uint64_t trials = 5;
};

/// Parses a sweep grid of the form `a:b:steps` into (gridFrom, gridTo,
/// gridSteps) on the given SweepArgs.
inline void parseGridSpec(const std::string& spec, SweepArgs& args) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos ||
      spec.find(':', c2 + 1) != std::string::npos)
    throw UsageError("--grid expects the form a:b:steps, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const std::string fromTok = spec.substr(0, c1);
    const std::string toTok = spec.substr(c1 + 1, c2 - c1 - 1);
    const std::string stepsTok = spec.substr(c2 + 1);
    args.gridFrom = std::stod(fromTok, &used);
    if (used != fromTok.size()) throw std::invalid_argument(fromTok);
    args.gridTo = std::stod(toTok, &used);
    if (used != toTok.size()) throw std::invalid_argument(toTok);
    const long long steps = std::stoll(stepsTok, &used);
    if (used != stepsTok.size() || steps < 1)
      throw std::invalid_argument(stepsTok);
    args.gridSteps = static_cast<std::uint64_t>(steps);
  } catch (const std::invalid_argument&) {
    throw UsageError("--grid expects numeric a:b:steps, got '" + spec + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("--grid value out of range in '" + spec + "'");
  }
}

// ---------------------------------------------------------------------------
// Helpers.
// ---------------------------------------------------------------------------

/// Amplitude indices are accepted as decimal integers or as n-character
/// bit-strings (most significant qubit first).  A token of length n over
/// {0,1} is read as a bit-string; for n = 1 the two readings coincide.
inline std::uint64_t parseAmplitudeIndex(const std::string& tok,
                                         QubitCount n) {
  if (tok.empty()) throw UsageError("empty amplitude index");
  const bool allBits =
      std::all_of(tok.begin(), tok.end(),
                  [](char c) { return c == '0' || c == '1'; });
  std::uint64_t idx = 0;
  if (allBits && tok.size() == n) {
    for (char c : tok) idx = (idx << 1) | (c == '1' ? 1u : 0u);
  } else {
    std::size_t used = 0;
    try {
      idx = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("bad amplitude index '" + tok + "'");
    }
    if (used != tok.size())
      throw UsageError("bad amplitude index '" + tok + "'");
  }
  if (idx >= dimension(n))
    throw UsageError("amplitude index " + tok + " out of range for n=" +
                     std::to_string(n));
  return idx;
}

namespace detail {

class PhaseTimer {
 public:
  explicit PhaseTimer(std::vector<std::pair<std::string, double>>& sink)
      : sink_(&sink), start_(std::chrono::steady_clock::now()) {}

  void lap(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    sink_->emplace_back(
        phase,
        std::chrono::duration<double, std::milli>(now - last_).count());
    last_ = now;
  }

  void total() {
    const auto now = std::chrono::steady_clock::now();
    sink_->emplace_back(
        "totalMs",
        std::chrono::duration<double, std::milli>(now - start_).count());
  }

 private:
  std::vector<std::pair<std::string, double>>* sink_;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point last_ = start_;
};

inline std::unique_ptr<RowOracle> loadOracle(const EvolveArgs& args) {
  if (args.hamiltonianPath && args.family)
    throw UsageError("--hamiltonian and --family are mutually exclusive");
  if (args.hamiltonianPath) {
    const std::optional<Mode> expect =
        args.mode == Mode::Hermitian ? std::optional<Mode>{}
                                     : std::optional<Mode>{Mode::Psd};
    return loadCooHamiltonian(*args.hamiltonianPath, expect);
  }
  if (!args.family)
    throw UsageError("one of --hamiltonian or --family is required");
  if (!args.n) throw UsageError("--family requires --n");
  std::unique_ptr<RowOracle> oracle =
      builtinHamiltonian(*args.family, *args.n, args.familyParams, args.seed);
  if (args.mode != Mode::Hermitian && !oracle->isPsd())
    throw DomainError("family '" + *args.family + "' is not PSD; mode " +
                      to_string(args.mode) + " requires a PSD operator");
  return oracle;
}

inline SparseState loadState(const EvolveArgs& args, QubitCount n) {
  if (args.statePath && args.basis)
    throw UsageError("--state and --basis are mutually exclusive");
  if (args.statePath) {
    SparseState psi = loadStateFile(*args.statePath);
    if (psi.qubits() != n)
      throw DomainError("state has " + std::to_string(psi.qubits()) +
                        " qubits but the operator has " + std::to_string(n));
    return psi;
  }
  return SparseState::basis(n, args.basis.value_or(0));
}

/// Cheap statistics when no planner formula needs the spectral norm:
/// totals from the weight trees, sqrt(frobSq) as a flagged upper bound.
inline HamiltonianStats quickStats(const RowOracle& oracle) {
  HamiltonianStats st;
  st.n = oracle.qubits();
  st.source = StatsSource::MarginalTree;
  st.traceH = oracle.totalWeight(WeightKind::Diagonal);
  st.frobSq = oracle.totalWeight(WeightKind::SquaredRowNorm);
  st.specNorm = std::sqrt(st.frobSq);
  st.specNormIsUpperBound = true;
  return st;
}

inline double quantileSorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Evolve pipeline: load -> stats -> plan -> sample -> sketch -> evolve ->
// query.
// ---------------------------------------------------------------------------

inline RunRecord runEvolve(const EvolveArgs& args) {
  RunRecord rec;
  detail::PhaseTimer timer(rec.wallTimes);

  const std::unique_ptr<RowOracle> oracle = detail::loadOracle(args);
  const QubitCount n = oracle->qubits();
  const SparseState psi = detail::loadState(args, n);
  timer.lap("loadMs");

  if (args.mode != Mode::Hermitian && !oracle->isPsd())
    throw DomainError("mode " + to_string(args.mode) +
                      " requires a PSD operator");
  if (args.mode == Mode::Density) {
    const double tr = oracle->totalWeight(WeightKind::Diagonal);
    if (std::abs(tr - 1.0) > 1e-9)
      throw DomainError("density mode requires unit trace; got " +
                        std::to_string(tr));
  }

  // Requested amplitude indices.
  std::vector<std::uint64_t> indices;
  if (args.fullState) {
    if (!args.amplitudeTokens.empty())
      throw UsageError("--amplitude and --full-state are mutually exclusive");
    if (n > kMaxDenseQubits)
      throw UsageError("--full-state limited to " +
                       std::to_string(kMaxDenseQubits) + " qubits");
    indices.resize(dimension(n));
    for (std::uint64_t i = 0; i < dimension(n); ++i) indices[i] = i;
  } else if (!args.amplitudeTokens.empty()) {
    for (const std::string& tok : args.amplitudeTokens)
      indices.push_back(parseAmplitudeIndex(tok, n));
  } else {
    indices.push_back(args.basis.value_or(
        psi.entries().empty() ? 0 : psi.entries().front().index));
  }
  rec.requestedAmplitudes = indices;

  // t = 0: the evolution is the identity; report psi itself.
  if (args.t == 0.0) {
    rec.plan.mode = args.mode;
    rec.plan.t = 0.0;
    rec.plan.epsilon = args.eps;
    rec.plan.delta = args.delta;
    rec.plan.K = 0;
    rec.plan.M = 0;
    rec.plan.seed = args.seed;
    rec.plan.stats = detail::quickStats(*oracle);
    rec.plan.warnings.push_back("t = 0: returned the input state exactly");
    timer.lap("planMs");
    for (const std::uint64_t i : indices)
      rec.amplitudes.push_back(psi.amplitude(i));
    if (args.exact && n <= kMaxExactQubits) rec.errorVsExact = 0.0;
    timer.lap("queryMs");
    timer.total();
    return rec;
  }

  // Trace shift (Hermitian mode only, on by default).
  const bool hermitian = args.mode == Mode::Hermitian;
  std::optional<ShiftedOracle> shifted;
  double alpha = 0.0;
  if (hermitian && !args.noTraceShift) {
    shifted.emplace(traceShift(*oracle));
    alpha = shifted->alpha();
  }
  const RowOracle& evolveOracle =
      shifted ? static_cast<const RowOracle&>(*shifted) : *oracle;

  // Plan.  Formulas are monotone in t, so negative times plan with |t|.
  const double tAbs = std::abs(args.t);
  EvolutionPlan plan;
  if (args.samplesOverride && args.orderOverride) {
    plan.mode = args.mode;
    plan.t = args.t;
    plan.epsilon = args.eps;
    plan.delta = args.delta;
    plan.stats = detail::quickStats(evolveOracle);
    applyPlanOverrides(plan, args.orderOverride, args.samplesOverride);
  } else {
    const HamiltonianStats stats =
        computeStats(evolveOracle, StatsMethod::Tree);
    plan = hermitian ? planHermitian(stats, tAbs, args.eps, args.delta)
                     : planPSD(stats, tAbs, args.eps, args.delta);
    plan.mode = args.mode;
    plan.t = args.t;
    applyPlanOverrides(plan, args.orderOverride, args.samplesOverride);
  }
  plan.alpha = alpha;
  plan.seed = args.seed;
  if (shifted && shifted->usedFallback())
    plan.warnings.push_back(
        "diagonal marginals unavailable; trace shift disabled (alpha = 0)");
  if (args.t < 0.0)
    plan.warnings.push_back("negative t: planned with |t|");
  timer.lap("planMs");

  const WeightKind kind =
      hermitian ? WeightKind::SquaredRowNorm : WeightKind::Diagonal;
  const SampleBatch batch = drawBatch(evolveOracle, kind, plan.M, args.seed);
  timer.lap("sampleMs");

  std::optional<EvolvedState> state;
  if (hermitian) {
    const SketchHermitian sketch =
        buildSketchHermitian(evolveOracle, batch, psi);
    timer.lap("sketchMs");
    state.emplace(evolveHermitian(sketch, psi, args.t, plan.K, evolveOracle));
    state->multiplyPhase(std::exp(Complex(0.0, alpha * args.t)));
  } else {
    const SketchPSD sketch =
        buildSketchPSD(evolveOracle, batch, psi, args.blockSize);
    timer.lap("sketchMs");
    state.emplace(evolvePSD(sketch, psi, args.t, plan.K, evolveOracle));
  }
  timer.lap("evolveMs");

  if (args.fullState) {
    const Eigen::VectorXcd dense = state->materializeDense();
    rec.amplitudes.assign(dense.data(), dense.data() + dense.size());
  } else {
    for (const std::uint64_t i : indices)
      rec.amplitudes.push_back(state->amplitude(i));
  }
  timer.lap("queryMs");

  if (args.exact) {
    if (n <= kMaxExactQubits) {
      const DenseHermitian H = DenseHermitian::fromOracle(*oracle);
      Eigen::VectorXcd psiDense =
          Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension(n)));
      for (const Entry& e : psi.entries())
        psiDense(static_cast<Eigen::Index>(e.index)) = e.value;
      const Eigen::VectorXcd truth = exactEvolve(H, psiDense, args.t);
      rec.errorVsExact = (state->materializeDense() - truth).norm();
    } else {
      plan.warnings.push_back(
          "exact comparison skipped: n exceeds the dense-reference limit");
    }
    timer.lap("exactMs");
  }

  rec.plan = plan;
  timer.total();
  return rec;
}

// ---------------------------------------------------------------------------
// Sweep pipeline.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> sweepGrid(const SweepArgs& args) {
  if (args.gridSteps < 1) throw UsageError("--grid needs at least 1 step");
  const bool axisM = args.axis == "M";
  std::string scale = args.gridScale.value_or(axisM ? "geometric" : "linear");
  if (scale != "linear" && scale != "geometric")
    throw UsageError("--grid-scale must be linear or geometric");
  const double a = args.gridFrom;
  const double b = args.gridTo;
  if (scale == "geometric" && !(a > 0.0 && b > 0.0))
    throw UsageError("geometric grids need positive endpoints");
  std::vector<double> pts;
  if (args.gridSteps == 1) {
    pts.push_back(a);
  } else {
    for (std::uint64_t k = 0; k < args.gridSteps; ++k) {
      const double f = static_cast<double>(k) /
                       static_cast<double>(args.gridSteps - 1);
      pts.push_back(scale == "geometric" ? a * std::pow(b / a, f)
                                         : a + (b - a) * f);
    }
  }
  if (args.axis == "M" || args.axis == "K") {
    for (double& p : pts) p = std::max(1.0, std::round(p));
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }
  return pts;
}

}  // namespace detail

/// Runs R seeded trials per grid point and reports error quantiles against
/// the dense reference.  Requires n <= 10.
inline std::vector<SweepRow> runSweep(const SweepArgs& args) {
  if (args.axis != "M" && args.axis != "K" && args.axis != "t")
    throw UsageError("sweep axis must be one of M, K, t");
  if (args.trials < 1) throw UsageError("--trials must be >= 1");

  EvolveArgs base = args.base;
  const std::unique_ptr<RowOracle> oracle = detail::loadOracle(base);
  const QubitCount n = oracle->qubits();
  if (n > 10)
    throw UsageError("sweeps need the dense reference and are limited to 10 "
                     "qubits");
  const SparseState psi = detail::loadState(base, n);
  const bool hermitian = base.mode == Mode::Hermitian;
  if (base.mode != Mode::Hermitian && !oracle->isPsd())
    throw DomainError("mode " + to_string(base.mode) +
                      " requires a PSD operator");

  std::optional<ShiftedOracle> shifted;
  double alpha = 0.0;
  if (hermitian && !base.noTraceShift) {
    shifted.emplace(traceShift(*oracle));
    alpha = shifted->alpha();
  }
  const RowOracle& evolveOracle =
      shifted ? static_cast<const RowOracle&>(*shifted) : *oracle;

  // Dense reference, shared across every grid point.
  const DenseHermitian H = DenseHermitian::fromOracle(*oracle);
  Eigen::VectorXcd psiDense =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension(n)));
  for (const Entry& e : psi.entries())
    psiDense(static_cast<Eigen::Index>(e.index)) = e.value;

  const HamiltonianStats stats = computeStats(evolveOracle, StatsMethod::Tree);
  const std::vector<double> grid = detail::sweepGrid(args);

  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double axisValue = grid[g];
    double t = args.axis == "t" ? axisValue : base.t;
    if (t == 0.0)
      throw UsageError("sweeps need t != 0 (t = 0 evolves nothing)");

    EvolutionPlan plan = hermitian
                             ? planHermitian(stats, std::abs(t), base.eps,
                                             base.delta)
                             : planPSD(stats, std::abs(t), base.eps,
                                       base.delta);
    applyPlanOverrides(plan, base.orderOverride, base.samplesOverride);
    if (args.axis == "M") plan.M = static_cast<std::uint64_t>(axisValue);
    if (args.axis == "K") plan.K = static_cast<std::uint64_t>(axisValue);

    const WeightKind kind =
        hermitian ? WeightKind::SquaredRowNorm : WeightKind::Diagonal;
    const Eigen::VectorXcd truth = exactEvolve(H, psiDense, t);

    std::vector<double> errors;
    std::vector<double> walls;
    for (std::uint64_t r = 0; r < args.trials; ++r) {
      const std::uint64_t trialSeed =
          deriveSeed(base.seed, g * args.trials + r);
      const auto start = std::chrono::steady_clock::now();
      const SampleBatch batch =
          drawBatch(evolveOracle, kind, plan.M, trialSeed);
      Eigen::VectorXcd approx;
      if (hermitian) {
        const SketchHermitian sketch =
            buildSketchHermitian(evolveOracle, batch, psi);
        EvolvedState st =
            evolveHermitian(sketch, psi, t, plan.K, evolveOracle);
        st.multiplyPhase(std::exp(Complex(0.0, alpha * t)));
        approx = st.materializeDense();
      } else {
        const SketchPSD sketch =
            buildSketchPSD(evolveOracle, batch, psi, base.blockSize);
        approx = evolvePSD(sketch, psi, t, plan.K, evolveOracle)
                     .materializeDense();
      }
      const auto stop = std::chrono::steady_clock::now();
      errors.push_back((approx - truth).norm());
      walls.push_back(
          std::chrono::duration<double, std::milli>(stop - start).count());
    }
    std::sort(errors.begin(), errors.end());
    std::sort(walls.begin(), walls.end());
    SweepRow row;
    row.axisValue = axisValue;
    row.seedCount = args.trials;
    row.medianError = detail::quantileSorted(errors, 0.5);
    row.q10 = detail::quantileSorted(errors, 0.1);
    row.q90 = detail::quantileSorted(errors, 0.9);
    row.wallMs = detail::quantileSorted(walls, 0.5);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hamsim
