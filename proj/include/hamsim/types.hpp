#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hamsim {

using Complex = std::complex<double>;

/// Number of qubits n; the operator dimension is N = 2^n.
using QubitCount = unsigned;

/// Largest supported qubit count; keeps 2^n and all index arithmetic inside
/// an unsigned 64-bit integer.
inline constexpr QubitCount kMaxQubits = 62;

// ---------------------------------------------------------------------------
// Error taxonomy.  The CLI maps each branch to a distinct exit code, so new
// error types should subclass one of these rather than Error directly.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, flag conflicts, violated call preconditions.  Exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Missing or unreadable files.  Exit code 3.
class FileError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (reported with a line number).  Exit code 3.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Violated mathematical contracts: asymmetry, mode mismatches, degenerate
/// weights.  Exit code 4.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Hermitian-symmetry violation in an input matrix.
class SymmetryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Total sampling weight is zero (H = 0 has no sampling distribution).
class DegenerateWeightError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An oracle broke its own contract (NaN or negative marginal, ...).
class OracleFaultError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// NaN/Inf mid-computation, eigensolver failure, non-convergence.  Exit 5.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Memory or size guard tripped.  Exit code 6.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Qubit counts and operating modes.
// ---------------------------------------------------------------------------

/// Validates a qubit count and returns it, so call sites can write
/// `n_ = checkQubitCount(n)` in initializer lists.
inline unsigned checkQubitCount(unsigned n) {
  if (n < 1 || n > kMaxQubits)
    throw UsageError("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                     "], got " + std::to_string(n));
  return n;
}

/// Dimension N = 2^n of the Hilbert space.
inline std::uint64_t dimension(unsigned n) { return std::uint64_t{1} << n; }

/// Interpretation of the operator: PSD enables diagonal sampling and the
/// Nystrom evolver; Hermitian uses the squared-row-norm sketch; Density is
/// the PSD path plus a unit-trace check.
enum class Mode { Psd, Hermitian, Density };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Psd: return "psd";
    case Mode::Hermitian: return "hermitian";
    case Mode::Density: return "density";
  }
  return "?";
}

inline Mode parseMode(const std::string& s) {
  if (s == "psd") return Mode::Psd;
  if (s == "hermitian") return Mode::Hermitian;
  if (s == "density") return Mode::Density;
  throw UsageError("unknown mode '" + s + "' (expected psd|hermitian|density)");
}

}  // namespace hamsim
