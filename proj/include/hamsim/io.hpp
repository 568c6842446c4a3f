#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamsim/coo.hpp"
#include "hamsim/numeric.hpp"
#include "hamsim/plan.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

// ---------------------------------------------------------------------------
// State files:  header `n <qubits>`, then amplitude lines `i re im`;
// `#` starts a comment anywhere.  States must be unit-norm up to decimal
// rounding (1e-9); they are renormalized exactly on load.
// ---------------------------------------------------------------------------

inline SparseState loadStateFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open state file '" + path + "'");
  std::string line;
  std::size_t lineNo = 0;
  bool haveHeader = false;
  unsigned n = 0;
  std::vector<Entry> amps;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto toks = detail::splitTokens(line);
    if (toks.empty()) continue;
    if (!haveHeader) {
      if (toks.size() != 2 || toks[0] != "n")
        throw ParseError("line " + std::to_string(lineNo) +
                         ": expected header 'n <qubits>'");
      const std::uint64_t q = detail::parseIndexToken(toks[1], lineNo);
      if (q < 1 || q > kMaxQubits)
        throw ParseError("line " + std::to_string(lineNo) +
                         ": qubit count out of range");
      n = static_cast<unsigned>(q);
      haveHeader = true;
      continue;
    }
    if (toks.size() != 3)
      throw ParseError("line " + std::to_string(lineNo) +
                       ": expected 'i re im' (3 fields)");
    Entry e;
    e.index = detail::parseIndexToken(toks[0], lineNo);
    e.value = Complex(detail::parseRealToken(toks[1], lineNo),
                      detail::parseRealToken(toks[2], lineNo));
    if (e.index >= dimension(n))
      throw ParseError("line " + std::to_string(lineNo) +
                       ": index out of range for n=" + std::to_string(n));
    amps.push_back(e);
  }
  if (!haveHeader) throw ParseError("state file '" + path + "' is empty");
  {
    std::vector<std::uint64_t> idx;
    idx.reserve(amps.size());
    for (const Entry& e : amps) idx.push_back(e.index);
    std::sort(idx.begin(), idx.end());
    const auto dup = std::adjacent_find(idx.begin(), idx.end());
    if (dup != idx.end())
      throw ParseError("duplicate amplitude index " + std::to_string(*dup));
  }
  double sq = 0.0;
  for (const Entry& e : amps) sq += std::norm(e.value);
  if (std::abs(std::sqrt(sq) - 1.0) > 1e-9)
    throw DomainError("state file '" + path + "' has norm " +
                      std::to_string(std::sqrt(sq)) +
                      "; states must be unit-norm");
  return SparseState::normalized(n, std::move(amps));
}

inline void saveStateFile(const std::string& path, const SparseState& psi) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write state file '" + path + "'");
  out.precision(17);
  out << "n " << psi.qubits() << "\n";
  for (const Entry& e : psi.entries())
    out << e.index << " " << e.value.real() << " " << e.value.imag() << "\n";
  if (!out) throw FileError("failed writing state file '" + path + "'");
}

// ---------------------------------------------------------------------------
// Run records.
// ---------------------------------------------------------------------------

/// Result of one evolve run: the plan actually executed, the queried
/// amplitudes, the optional dense-reference error, and per-phase wall times.
struct RunRecord {
  EvolutionPlan plan;
  std::vector<std::uint64_t> requestedAmplitudes;
  std::vector<Complex> amplitudes;
  std::optional<double> errorVsExact;
  std::vector<std::pair<std::string, double>> wallTimes;  ///< (phase, ms)
  int formatVersion = 1;
};

namespace detail {

inline nlohmann::json statsToJson(const HamiltonianStats& st) {
  return nlohmann::json{{"traceH", st.traceH},
                        {"frobSq", st.frobSq},
                        {"specNorm", st.specNorm},
                        {"n", st.n},
                        {"source", to_string(st.source)},
                        {"specNormIsUpperBound", st.specNormIsUpperBound}};
}

inline nlohmann::json planToJson(const EvolutionPlan& plan) {
  return nlohmann::json{{"mode", to_string(plan.mode)},
                        {"t", plan.t},
                        {"eps", plan.epsilon},
                        {"delta", plan.delta},
                        {"K", plan.K},
                        {"M", plan.M},
                        {"alpha", plan.alpha},
                        {"seed", plan.seed},
                        {"kOverride", plan.kOverride},
                        {"mOverride", plan.mOverride},
                        {"stats", statsToJson(plan.stats)},
                        {"warnings", plan.warnings},
                        {"formulaVersion", plan.formulaVersion}};
}

}  // namespace detail

/// JSON form of a run record.  Keys serialize in sorted order and doubles in
/// shortest round-trip form, so identical records give identical bytes.  The
/// embedded determinismHash covers everything except wallTimes.
inline nlohmann::json toJson(const RunRecord& rec) {
  nlohmann::json j;
  j["formatVersion"] = rec.formatVersion;
  j["plan"] = detail::planToJson(rec.plan);
  j["requestedAmplitudes"] = rec.requestedAmplitudes;
  nlohmann::json amps = nlohmann::json::array();
  for (const Complex& a : rec.amplitudes)
    amps.push_back(nlohmann::json::array({a.real(), a.imag()}));
  j["amplitudes"] = std::move(amps);
  if (rec.errorVsExact) j["errorVsExact"] = *rec.errorVsExact;
  const std::string canonical = j.dump();
  {
    std::ostringstream hex;
    hex << std::hex << fnv1a64(canonical);
    j["determinismHash"] = hex.str();
  }
  nlohmann::json times;
  for (const auto& [phase, ms] : rec.wallTimes) times[phase] = ms;
  j["wallTimes"] = std::move(times);
  return j;
}

// ---------------------------------------------------------------------------
// Sweep CSV.
// ---------------------------------------------------------------------------

struct SweepRow {
  double axisValue = 0.0;
  std::uint64_t seedCount = 0;
  double medianError = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double wallMs = 0.0;
};

inline void writeSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axisValue,seedCount,medianError,q10,q90,wallMs\n";
  out.precision(17);
  for (const SweepRow& r : rows)
    out << r.axisValue << "," << r.seedCount << "," << r.medianError << ","
        << r.q10 << "," << r.q90 << "," << r.wallMs << "\n";
}

inline void writeSweepCsv(const std::string& path,
                          const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write CSV file '" + path + "'");
  writeSweepCsv(out, rows);
  if (!out) throw FileError("failed writing CSV file '" + path + "'");
}

}  // namespace hamsim
