#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hamsim/oracle.hpp"
#include "hamsim/prefix_weights.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// One (row, col, value) triple of a Hamiltonian given in coordinate form.
struct CooEntry {
  std::uint64_t r = 0;
  std::uint64_t c = 0;
  Complex v{};
};

/// Entry count guard for explicitly tabulated operators (~3 GiB of entries).
inline constexpr std::size_t kMaxExplicitEntries = std::size_t{1} << 26;

/// Hermitian-symmetry tolerance on matrix entries.
inline constexpr double kSymmetryTol = 1e-12;

// ---------------------------------------------------------------------------
// ExplicitOracle: a RowOracle over an explicitly stored entry list, with
// prefix marginals served by cumulative sums over the present rows.
// ---------------------------------------------------------------------------

class ExplicitOracle final : public RowOracle {
 public:
  /// Builds from an entry list that may contain either one or both members
  /// of each Hermitian pair: a missing (j,i) partner is derived as the
  /// conjugate, a present one must match within 1e-12.  Exact zeros are
  /// dropped.  Throws SymmetryError / DomainError / ResourceError.
  static ExplicitOracle fromEntries(unsigned n, Mode mode,
                                    std::vector<CooEntry> entries) {
    return ExplicitOracle(n, mode, std::move(entries));
  }

  /// Tabulates a dense Hermitian matrix (tests and small instances).
  static ExplicitOracle fromDense(unsigned n, Mode mode,
                                  const Eigen::MatrixXcd& m) {
    const std::uint64_t N = dimension(checkQubitCount(n));
    if (static_cast<std::uint64_t>(m.rows()) != N ||
        static_cast<std::uint64_t>(m.cols()) != N)
      throw UsageError("fromDense: matrix shape does not match qubit count");
    std::vector<CooEntry> entries;
    for (std::uint64_t i = 0; i < N; ++i)
      for (std::uint64_t j = 0; j < N; ++j)
        if (m(i, j) != Complex{}) entries.push_back({i, j, m(i, j)});
    return fromEntries(n, mode, std::move(entries));
  }

  unsigned qubits() const override { return n_; }
  Mode mode() const override { return mode_; }

  SparseRow row(std::uint64_t i) const override {
    const std::size_t pos = rowPosition(i);
    if (pos == rows_.size() || rows_[pos] != i) return SparseRow{};
    return SparseRow(std::vector<Entry>(entries_.begin() + rowStart_[pos],
                                        entries_.begin() + rowStart_[pos + 1]),
                     dim());
  }

  double diag(std::uint64_t i) const override {
    const std::size_t pos = rowPosition(i);
    return (pos < rows_.size() && rows_[pos] == i) ? diagW_[pos] : 0.0;
  }

  double rowSqNorm(std::uint64_t i) const override {
    const std::size_t pos = rowPosition(i);
    return (pos < rows_.size() && rows_[pos] == i) ? sqW_[pos] : 0.0;
  }

  std::size_t storedEntryCount() const { return entries_.size(); }

 protected:
  double marginalImpl(const Prefix& p, WeightKind kind) const override {
    return weights_.marginal(p, kind, n_);
  }

 private:
  ExplicitOracle(unsigned n, Mode mode, std::vector<CooEntry> raw)
      : n_(checkQubitCount(n)), mode_(mode) {
    const std::uint64_t N = dim();
    std::erase_if(raw, [](const CooEntry& e) { return e.v == Complex{}; });
    if (raw.size() > kMaxExplicitEntries / 2)
      throw ResourceError("explicit Hamiltonian exceeds the entry budget");
    for (const CooEntry& e : raw) {
      if (e.r >= N || e.c >= N)
        throw DomainError("entry index out of range for n=" + std::to_string(n_));
    }
    auto byRowCol = [](const CooEntry& a, const CooEntry& b) {
      return a.r != b.r ? a.r < b.r : a.c < b.c;
    };
    std::sort(raw.begin(), raw.end(), byRowCol);
    for (std::size_t k = 1; k < raw.size(); ++k)
      if (raw[k].r == raw[k - 1].r && raw[k].c == raw[k - 1].c)
        throw DomainError("duplicate entry at (" + std::to_string(raw[k].r) +
                          ", " + std::to_string(raw[k].c) + ")");

    // Hermitian validation, deriving missing transpose partners.
    std::vector<CooEntry> derived;
    for (const CooEntry& e : raw) {
      if (e.r == e.c) {
        if (std::abs(e.v.imag()) > kSymmetryTol)
          throw SymmetryError("diagonal entry (" + std::to_string(e.r) + ", " +
                              std::to_string(e.r) + ") has imaginary part " +
                              std::to_string(e.v.imag()));
        continue;
      }
      const auto it = std::lower_bound(
          raw.begin(), raw.end(), CooEntry{e.c, e.r, {}}, byRowCol);
      if (it != raw.end() && it->r == e.c && it->c == e.r) {
        if (std::abs(it->v - std::conj(e.v)) > kSymmetryTol)
          throw SymmetryError("entries (" + std::to_string(e.r) + ", " +
                              std::to_string(e.c) + ") and transpose are not "
                              "conjugate within 1e-12");
      } else {
        derived.push_back({e.c, e.r, std::conj(e.v)});
      }
    }
    raw.insert(raw.end(), derived.begin(), derived.end());
    std::sort(raw.begin(), raw.end(), byRowCol);

    // Keep the diagonal exactly real.
    for (CooEntry& e : raw)
      if (e.r == e.c) e.v = Complex{e.v.real(), 0.0};

    // Group into rows and tabulate weights.
    std::vector<double> diagW, sqW;
    for (std::size_t k = 0; k < raw.size();) {
      const std::uint64_t r = raw[k].r;
      rows_.push_back(r);
      rowStart_.push_back(entries_.size());
      double d = 0.0;
      NeumaierSum sq;
      for (; k < raw.size() && raw[k].r == r; ++k) {
        entries_.push_back({raw[k].c, raw[k].v});
        sq.add(std::norm(raw[k].v));
        if (raw[k].c == r) d = raw[k].v.real();
      }
      if (isPsd() && d < 0.0)
        throw DomainError("PSD mode requires nonnegative diagonal; row " +
                          std::to_string(r) + " has " + std::to_string(d));
      diagW.push_back(d);
      sqW.push_back(sq.value());
    }
    rowStart_.push_back(entries_.size());
    diagW_ = diagW;
    sqW_ = sqW;
    weights_ = PrefixWeights::overRows(rows_, std::move(diagW), std::move(sqW));
  }

  std::size_t rowPosition(std::uint64_t i) const {
    return static_cast<std::size_t>(
        std::lower_bound(rows_.begin(), rows_.end(), i) - rows_.begin());
  }

  unsigned n_;
  Mode mode_;
  std::vector<std::uint64_t> rows_;      // present rows, sorted
  std::vector<std::size_t> rowStart_;    // rows_.size()+1 offsets into entries_
  std::vector<Entry> entries_;           // concatenated row entries
  std::vector<double> diagW_, sqW_;      // per present row
  PrefixWeights weights_;
};

// ---------------------------------------------------------------------------
// COO text format:  header `n <qubits> mode <psd|hermitian>`, then entry
// lines `i j re im`; `#` starts a comment anywhere.
// ---------------------------------------------------------------------------

struct ParsedCoo {
  unsigned n = 0;
  Mode mode = Mode::Psd;
  std::vector<CooEntry> entries;
};

namespace detail {

inline std::uint64_t parseIndexToken(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": bad index '" + tok + "'");
  }
  if (used != tok.size() || tok[0] == '-')
    throw ParseError("line " + std::to_string(line) + ": bad index '" + tok + "'");
  return v;
}

inline double parseRealToken(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": bad real '" + tok + "'");
  }
  if (used != tok.size())
    throw ParseError("line " + std::to_string(line) + ": bad real '" + tok + "'");
  if (!std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

inline std::vector<std::string> splitTokens(std::string line) {
  if (const auto hash = line.find('#'); hash != std::string::npos)
    line.resize(hash);
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace detail

inline ParsedCoo parseCooFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open Hamiltonian file '" + path + "'");
  ParsedCoo out;
  std::string line;
  std::size_t lineNo = 0;
  bool haveHeader = false;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto toks = detail::splitTokens(line);
    if (toks.empty()) continue;
    if (!haveHeader) {
      if (toks.size() != 4 || toks[0] != "n" || toks[2] != "mode")
        throw ParseError("line " + std::to_string(lineNo) +
                         ": expected header 'n <qubits> mode <psd|hermitian>'");
      const std::uint64_t n = detail::parseIndexToken(toks[1], lineNo);
      if (n < 1 || n > kMaxQubits)
        throw ParseError("line " + std::to_string(lineNo) +
                         ": qubit count out of range");
      out.n = static_cast<unsigned>(n);
      if (toks[3] == "psd")
        out.mode = Mode::Psd;
      else if (toks[3] == "hermitian")
        out.mode = Mode::Hermitian;
      else
        throw ParseError("line " + std::to_string(lineNo) +
                         ": mode must be psd or hermitian, got '" + toks[3] + "'");
      haveHeader = true;
      continue;
    }
    if (toks.size() != 4)
      throw ParseError("line " + std::to_string(lineNo) +
                       ": expected 'i j re im' (4 fields, got " +
                       std::to_string(toks.size()) + ")");
    CooEntry e;
    e.r = detail::parseIndexToken(toks[0], lineNo);
    e.c = detail::parseIndexToken(toks[1], lineNo);
    e.v = Complex{detail::parseRealToken(toks[2], lineNo),
                  detail::parseRealToken(toks[3], lineNo)};
    const std::uint64_t N = dimension(out.n);
    if (e.r >= N || e.c >= N)
      throw ParseError("line " + std::to_string(lineNo) + ": index out of range");
    out.entries.push_back(e);
    if (out.entries.size() > kMaxExplicitEntries)
      throw ResourceError("Hamiltonian file exceeds the entry budget");
  }
  if (!haveHeader) throw ParseError("empty Hamiltonian file '" + path + "'");

  // Report duplicates with a parse (not domain) error: they are a file defect.
  auto sorted = out.entries;
  std::sort(sorted.begin(), sorted.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k].r == sorted[k - 1].r && sorted[k].c == sorted[k - 1].c)
      throw ParseError("duplicate entry (" + std::to_string(sorted[k].r) + ", " +
                       std::to_string(sorted[k].c) + ") in '" + path + "'");
  return out;
}

/// Loads a COO Hamiltonian file.  When `expect` is given, the file's mode
/// header must match (density expects a psd file; its unit-trace check
/// happens at the call site).
inline std::unique_ptr<RowOracle> loadCooHamiltonian(
    const std::string& path, std::optional<Mode> expect = std::nullopt) {
  ParsedCoo parsed = parseCooFile(path);
  if (expect) {
    const Mode want = *expect == Mode::Density ? Mode::Psd : *expect;
    if (parsed.mode != want)
      throw DomainError("file '" + path + "' declares mode " +
                        to_string(parsed.mode) + " but " + to_string(*expect) +
                        " was requested");
    parsed.mode = *expect == Mode::Density ? Mode::Density : parsed.mode;
  }
  return std::make_unique<ExplicitOracle>(ExplicitOracle::fromEntries(
      parsed.n, parsed.mode, std::move(parsed.entries)));
}

/// Writes a COO Hamiltonian file in the same format parseCooFile reads.
inline void writeCooFile(const std::string& path, unsigned n, Mode mode,
                         const std::vector<CooEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write Hamiltonian file '" + path + "'");
  out.precision(17);
  out << "n " << n << " mode " << to_string(mode == Mode::Density ? Mode::Psd : mode)
      << "\n";
  for (const CooEntry& e : entries)
    out << e.r << " " << e.c << " " << e.v.real() << " " << e.v.imag() << "\n";
  if (!out) throw FileError("write failed for '" + path + "'");
}

}  // namespace hamsim
