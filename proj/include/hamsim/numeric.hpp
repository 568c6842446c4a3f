#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hamsim {

// ---------------------------------------------------------------------------
// SplitMix64: the counter-based 64-bit generator used everywhere.  Keyed
// access (seed, counter) -> uint64 makes parallel draws order-independent.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 output finalizer.
inline std::uint64_t splitmix64Finalize(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// The (counter+1)-th output of a SplitMix64 stream seeded with `seed`.
/// Equals SplitMix64{seed}.next() called counter+1 times.
inline std::uint64_t splitmix64At(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64Finalize(seed + (counter + 1) * kSplitMixGamma);
}

/// Maps 64 random bits to a double in [0, 1) with 53-bit resolution.
inline double unitDouble(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Keyed uniform deviate in [0, 1): deterministic in (seed, counter) and
/// independent of evaluation order.
inline double counterUniform(std::uint64_t seed, std::uint64_t counter) {
  return unitDouble(splitmix64At(seed, counter));
}

/// Derives an independent stream seed from a base seed and a stream id
/// (used to give each substream its own SplitMix64 sequence).
inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64Finalize(seed ^ splitmix64Finalize(stream + kSplitMixGamma));
}

/// Small sequential SplitMix64 stream for construction-time randomness.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64Finalize(state_ += kSplitMixGamma); }
  double nextDouble() { return unitDouble(next()); }
  /// Uniform in [lo, hi).
  double nextIn(double lo, double hi) { return lo + (hi - lo) * nextDouble(); }
  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t nextBelow(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Compensated summation.
// ---------------------------------------------------------------------------

/// Neumaier variant of Kahan summation: exact for the error of each add even
/// when the addend exceeds the running sum.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// ---------------------------------------------------------------------------
// Double-double arithmetic: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
// Only the handful of operations needed by the compensated series evaluator
// are provided.  Relies on std::fma being correctly rounded.
// ---------------------------------------------------------------------------

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}
  explicit constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}

  double value() const { return hi + lo; }
};

namespace detail {

/// Error-free sum: a + b = s + e exactly (Knuth two-sum, no magnitude order).
inline DoubleDouble twoSum(double a, double b) {
  const double s = a + b;
  const double bv = s - a;
  const double e = (a - (s - bv)) + (b - bv);
  return {s, e};
}

/// Error-free sum for |a| >= |b| (Dekker fast two-sum).
inline DoubleDouble fastTwoSum(double a, double b) {
  const double s = a + b;
  const double e = b - (s - a);
  return {s, e};
}

/// Error-free product: a * b = p + e exactly.
inline DoubleDouble twoProd(double a, double b) {
  const double p = a * b;
  const double e = std::fma(a, b, -p);
  return {p, e};
}

}  // namespace detail

inline DoubleDouble ddAdd(const DoubleDouble& a, const DoubleDouble& b) {
  DoubleDouble s = detail::twoSum(a.hi, b.hi);
  DoubleDouble t = detail::twoSum(a.lo, b.lo);
  double lo = s.lo + t.hi;
  DoubleDouble r = detail::fastTwoSum(s.hi, lo);
  r.lo += t.lo;
  return detail::fastTwoSum(r.hi, r.lo);
}

inline DoubleDouble ddMul(const DoubleDouble& a, double b) {
  DoubleDouble p = detail::twoProd(a.hi, b);
  p.lo = std::fma(a.lo, b, p.lo);
  return detail::fastTwoSum(p.hi, p.lo);
}

inline DoubleDouble ddDiv(const DoubleDouble& a, double b) {
  const double q1 = a.hi / b;
  // Remainder of the first quotient digit, computed exactly via fma.
  DoubleDouble p = detail::twoProd(q1, b);
  const double r = ((a.hi - p.hi) - p.lo) + a.lo;
  const double q2 = r / b;
  return detail::fastTwoSum(q1, q2);
}

inline DoubleDouble ddNeg(const DoubleDouble& a) { return {-a.hi, -a.lo}; }

// ---------------------------------------------------------------------------
// FNV-1a 64-bit hash, used for the determinism digest of run records.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = 0xCBF29CE484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace hamsim
