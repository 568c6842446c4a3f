#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/numeric.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/prefix_weights.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

namespace detail {

// ---------------------------------------------------------------------------
// Partial sums of 1/k and 1/k^2 over (a, b], exact enough for prefix
// marginals at any n <= 62.  Short ranges are summed directly; long ranges
// use Euler-Maclaurin asymptotics written in *difference form* — every term
// carries the common factor (b - a), so nearby endpoints do not cancel.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDirectSumLimit = 1024;

inline double sumReciprocalDirect(std::uint64_t a, std::uint64_t b) {
  NeumaierSum s;
  for (std::uint64_t k = b; k > a; --k) s.add(1.0 / static_cast<double>(k));
  return s.value();
}

inline double sumReciprocalSqDirect(std::uint64_t a, std::uint64_t b) {
  NeumaierSum s;
  for (std::uint64_t k = b; k > a; --k) {
    const double x = static_cast<double>(k);
    s.add(1.0 / (x * x));
  }
  return s.value();
}

/// H_b - H_a for a, b >= kDirectSumLimit.
inline double harmonicDiffAsymptotic(std::uint64_t ua, std::uint64_t ub) {
  const double a = static_cast<double>(ua), b = static_cast<double>(ub);
  const double d = b - a;
  const double a2 = a * a, b2 = b * b;
  double s = std::log1p(d / a);
  s -= d / (2.0 * a * b);
  s += d * (a + b) / (12.0 * a2 * b2);
  const double a4 = a2 * a2, b4 = b2 * b2;
  s -= d * ((a2 + b2) * (a + b)) / (120.0 * a4 * b4);  // a^3+a^2 b+a b^2+b^3
  const double p5 = a4 * a + a4 * b + a2 * a * b2 + a2 * b2 * b + a * b4 + b4 * b;
  s += d * p5 / (252.0 * (a4 * a2) * (b4 * b2));
  return s;
}

/// sum_{k in (a, b]} 1/k^2 for a, b >= kDirectSumLimit.
inline double reciprocalSqDiffAsymptotic(std::uint64_t ua, std::uint64_t ub) {
  const double a = static_cast<double>(ua), b = static_cast<double>(ub);
  const double d = b - a;
  const double a2 = a * a, b2 = b * b;
  double s = d / (a * b);
  s -= d * (a + b) / (2.0 * a2 * b2);
  s += d * (a2 + a * b + b2) / (6.0 * (a2 * a) * (b2 * b));
  const double a4 = a2 * a2, b4 = b2 * b2;
  const double p4 = a4 + a2 * a * b + a2 * b2 + a * b2 * b + b4;
  s -= d * p4 / (30.0 * (a4 * a) * (b4 * b));
  const double p6 = a4 * a2 + a4 * a * b + a4 * b2 + a2 * a * b2 * b + a2 * b4 +
                    a * b4 * b + b4 * b2;
  s += d * p6 / (42.0 * (a4 * a2 * a) * (b4 * b2 * b));
  return s;
}

/// sum_{k=a+1}^{b} 1/k.
inline double sumReciprocal(std::uint64_t a, std::uint64_t b) {
  if (a >= b) return 0.0;
  if (b - a <= kDirectSumLimit || b <= 2 * kDirectSumLimit)
    return sumReciprocalDirect(a, b);
  if (a < kDirectSumLimit)
    return sumReciprocalDirect(a, kDirectSumLimit) +
           harmonicDiffAsymptotic(kDirectSumLimit, b);
  return harmonicDiffAsymptotic(a, b);
}

/// sum_{k=a+1}^{b} 1/k^2.
inline double sumReciprocalSq(std::uint64_t a, std::uint64_t b) {
  if (a >= b) return 0.0;
  if (b - a <= kDirectSumLimit || b <= 2 * kDirectSumLimit)
    return sumReciprocalSqDirect(a, b);
  if (a < kDirectSumLimit)
    return sumReciprocalSqDirect(a, kDirectSumLimit) +
           reciprocalSqDiffAsymptotic(kDirectSumLimit, b);
  return reciprocalSqDiffAsymptotic(a, b);
}

/// Deterministic standard-normal pair (Box-Muller; avoids the
/// implementation-defined std::normal_distribution).
inline std::pair<double, double> gaussianPair(SplitMix64& rng) {
  const double u1 = 1.0 - rng.nextDouble();  // (0, 1]
  const double u2 = rng.nextDouble();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// inverse-diag: H_ii = 1/(i+1) (diagonal), marginals by harmonic sums.
// Supports the full n <= 62 range with O(1) storage.
// ---------------------------------------------------------------------------

class InverseDiagOracle final : public RowOracle {
 public:
  explicit InverseDiagOracle(unsigned n, double scale = 1.0)
      : n_(checkQubitCount(n)), scale_(scale) {
    if (!(scale > 0.0)) throw UsageError("inverse-diag: scale must be positive");
  }

  unsigned qubits() const override { return n_; }
  Mode mode() const override { return Mode::Psd; }

  SparseRow row(std::uint64_t i) const override {
    return SparseRow({{i, Complex{diag(i), 0.0}}}, dim());
  }
  // Leaf weights use the same expressions as the full-length marginals so
  // they match bit-for-bit.
  double diag(std::uint64_t i) const override {
    return scale_ * (1.0 / static_cast<double>(i + 1));
  }
  double rowSqNorm(std::uint64_t i) const override {
    const double x = static_cast<double>(i + 1);
    return scale_ * scale_ * (1.0 / (x * x));
  }

 protected:
  double marginalImpl(const Prefix& p, WeightKind kind) const override {
    const std::uint64_t lo = p.blockBegin(n_), hi = p.blockEnd(n_);
    if (kind == WeightKind::Diagonal)
      return scale_ * detail::sumReciprocal(lo, hi);
    return scale_ * scale_ * detail::sumReciprocalSq(lo, hi);
  }

 private:
  unsigned n_;
  double scale_;
};

// ---------------------------------------------------------------------------
// laplacian-path: the path-graph Laplacian (PSD, row sums zero), closed-form
// marginals, O(1) storage at any n <= 62.
// ---------------------------------------------------------------------------

class LaplacianPathOracle final : public RowOracle {
 public:
  explicit LaplacianPathOracle(unsigned n, double scale = 1.0)
      : n_(checkQubitCount(n)), scale_(scale) {
    if (!(scale > 0.0))
      throw UsageError("laplacian-path: scale must be positive");
  }

  unsigned qubits() const override { return n_; }
  Mode mode() const override { return Mode::Psd; }

  SparseRow row(std::uint64_t i) const override {
    const std::uint64_t N = dim();
    std::vector<Entry> e;
    if (i > 0) e.push_back({i - 1, Complex{-scale_, 0.0}});
    e.push_back({i, Complex{diag(i), 0.0}});
    if (i + 1 < N) e.push_back({i + 1, Complex{-scale_, 0.0}});
    return SparseRow(std::move(e), N);
  }

  double diag(std::uint64_t i) const override {
    return scale_ * (isBoundary(i) ? 1.0 : 2.0);
  }
  double rowSqNorm(std::uint64_t i) const override {
    return scale_ * scale_ * (isBoundary(i) ? 2.0 : 6.0);
  }

 protected:
  double marginalImpl(const Prefix& p, WeightKind kind) const override {
    const std::uint64_t lo = p.blockBegin(n_), hi = p.blockEnd(n_);
    const double cnt = static_cast<double>(hi - lo);
    const double boundaries =
        (lo == 0 ? 1.0 : 0.0) + (hi == dim() ? 1.0 : 0.0);
    if (kind == WeightKind::Diagonal)
      return scale_ * (2.0 * cnt - boundaries);
    return scale_ * scale_ * (6.0 * cnt - 4.0 * boundaries);
  }

 private:
  bool isBoundary(std::uint64_t i) const { return i == 0 || i + 1 == dim(); }

  unsigned n_;
  double scale_;
};

// ---------------------------------------------------------------------------
// random-sparse-{psd,hermitian}: a circulant sparsity pattern (a few random
// index gaps, wrapped mod N) with hashed complex values; the PSD variant is
// made strictly diagonally dominant.  Rows are generated on demand; only the
// two weight prefix-sum tables are stored, so construction is one O(N)
// sweep and the family is capped at n <= 20.
// ---------------------------------------------------------------------------

class RandomSparseOracle final : public RowOracle {
 public:
  static constexpr unsigned kMaxQubitsTabulated = 20;

  RandomSparseOracle(unsigned n, Mode mode, unsigned nnzPerRow,
                     std::uint64_t seed, double scale = 1.0)
      : n_(checkQubitCount(n)), mode_(mode), seed_(seed), scale_(scale) {
    if (mode != Mode::Psd && mode != Mode::Hermitian)
      throw UsageError("random-sparse: mode must be psd or hermitian");
    if (n_ > kMaxQubitsTabulated)
      throw DomainError("random-sparse families tabulate weights and require n <= " +
                        std::to_string(kMaxQubitsTabulated));
    if (!(scale > 0.0)) throw UsageError("random-sparse: scale must be positive");
    if (nnzPerRow < 1) throw UsageError("random-sparse: nnz per row must be >= 1");
    const std::uint64_t N = dim();
    const std::uint64_t half = N / 2;
    const std::uint64_t pairs = std::min<std::uint64_t>((nnzPerRow - 1) / 2, half);
    SplitMix64 rng(deriveSeed(seed, 0x67617073 /* "gaps" */));
    while (gaps_.size() < pairs) {
      const std::uint64_t g = 1 + rng.nextBelow(half);
      if (std::find(gaps_.begin(), gaps_.end(), g) == gaps_.end())
        gaps_.push_back(g);
    }
    std::sort(gaps_.begin(), gaps_.end());

    std::vector<double> diagW(N), sqW(N);
    for (std::uint64_t i = 0; i < N; ++i) {
      const SparseRow r = row(i);
      diagW[i] = r.at(i).real();
      sqW[i] = r.sqNorm();
    }
    weights_ = PrefixWeights::dense(std::move(diagW), std::move(sqW));
  }

  unsigned qubits() const override { return n_; }
  Mode mode() const override { return mode_; }

  SparseRow row(std::uint64_t i) const override {
    const std::uint64_t N = dim();
    std::vector<Entry> e;
    e.reserve(2 * gaps_.size() + 1);
    double absSum = 0.0;
    for (const std::uint64_t g : gaps_) {
      for (const std::uint64_t j : {(i + g) % N, (i + N - g) % N}) {
        if (j == i || (g * 2 == N && !e.empty() && e.back().index == j)) continue;
        const Complex v = pairValue(std::min(i, j), std::max(i, j));
        e.push_back({j, i < j ? v : std::conj(v)});
        absSum += std::abs(v);
      }
    }
    e.push_back({i, Complex{diagValue(i, absSum), 0.0}});
    std::sort(e.begin(), e.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    return SparseRow(std::move(e), N);
  }

  double diag(std::uint64_t i) const override { return row(i).at(i).real(); }
  double rowSqNorm(std::uint64_t i) const override { return row(i).sqNorm(); }

 protected:
  double marginalImpl(const Prefix& p, WeightKind kind) const override {
    return weights_.marginal(p, kind, n_);
  }

 private:
  Complex pairValue(std::uint64_t lo, std::uint64_t hi) const {
    SplitMix64 rng(deriveSeed(seed_, lo * dim() + hi + 1));
    const double mag = scale_ * rng.nextIn(0.3, 1.0);
    const double phase = rng.nextIn(0.0, 2.0 * std::numbers::pi);
    return Complex{mag * std::cos(phase), mag * std::sin(phase)};
  }

  double diagValue(std::uint64_t i, double offDiagAbsSum) const {
    SplitMix64 rng(deriveSeed(seed_, (i + 1) * 0x64696167 /* "diag" */));
    if (mode_ == Mode::Psd)  // Gershgorin: eigenvalues >= the ridge > 0
      return offDiagAbsSum + scale_ * rng.nextIn(0.1, 0.5);
    return scale_ * rng.nextIn(-1.0, 1.0);
  }

  unsigned n_;
  Mode mode_;
  std::uint64_t seed_;
  double scale_;
  std::vector<std::uint64_t> gaps_;
  PrefixWeights weights_;
};

// ---------------------------------------------------------------------------
// rank-r-psd: H = sum_k lambda_k w_k w_k* with orthonormal w_k.  Rows are
// dense, so the family is for small n; weights use the closed forms
// H_ii = sum lambda_k |w_k[i]|^2 and (H^2)_ii = sum lambda_k^2 |w_k[i]|^2.
// ---------------------------------------------------------------------------

class RankRPsdOracle final : public RowOracle {
 public:
  static constexpr unsigned kMaxQubitsDense = 12;

  /// Random orthonormal factors with hashed eigenvalues in [0.25, 1].
  RankRPsdOracle(unsigned n, std::uint64_t rank, std::uint64_t seed,
                 double scale = 1.0)
      : RankRPsdOracle(n, randomFactors(n, rank, seed),
                       randomEigenvalues(rank, seed, scale)) {}

  /// Exact factor control (tests): columns of `factors` must be orthonormal.
  RankRPsdOracle(unsigned n, Eigen::MatrixXcd factors,
                 Eigen::VectorXd eigenvalues)
      : n_(checkQubitCount(n)),
        factors_(std::move(factors)),
        lambda_(std::move(eigenvalues)) {
    if (n_ > kMaxQubitsDense)
      throw DomainError("rank-r-psd has dense rows and requires n <= " +
                        std::to_string(kMaxQubitsDense));
    const auto N = static_cast<Eigen::Index>(dim());
    if (factors_.rows() != N || factors_.cols() != lambda_.size() ||
        lambda_.size() < 1)
      throw UsageError("rank-r-psd: factor shape mismatch");
    if (lambda_.minCoeff() < 0.0)
      throw DomainError("rank-r-psd: eigenvalues must be nonnegative");

    std::vector<double> diagW(N), sqW(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      double d = 0.0, s = 0.0;
      for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
        const double w2 = std::norm(factors_(i, k));
        d += lambda_[k] * w2;
        s += lambda_[k] * lambda_[k] * w2;
      }
      diagW[i] = d;
      sqW[i] = s;
    }
    weights_ = PrefixWeights::dense(std::move(diagW), std::move(sqW));
  }

  unsigned qubits() const override { return n_; }
  Mode mode() const override { return Mode::Psd; }

  SparseRow row(std::uint64_t i) const override {
    const auto N = static_cast<Eigen::Index>(dim());
    std::vector<Entry> e;
    e.reserve(N);
    for (Eigen::Index j = 0; j < N; ++j) {
      Complex v{};
      for (Eigen::Index k = 0; k < lambda_.size(); ++k)
        v += lambda_[k] * factors_(static_cast<Eigen::Index>(i), k) *
             std::conj(factors_(j, k));
      if (v != Complex{}) e.push_back({static_cast<std::uint64_t>(j), v});
    }
    return SparseRow(std::move(e), dim());
  }

  double diag(std::uint64_t i) const override {
    double d = 0.0;
    for (Eigen::Index k = 0; k < lambda_.size(); ++k)
      d += lambda_[k] * std::norm(factors_(static_cast<Eigen::Index>(i), k));
    return d;
  }

  double rowSqNorm(std::uint64_t i) const override {
    double s = 0.0;
    for (Eigen::Index k = 0; k < lambda_.size(); ++k)
      s += lambda_[k] * lambda_[k] *
           std::norm(factors_(static_cast<Eigen::Index>(i), k));
    return s;
  }

  const Eigen::VectorXd& eigenvalues() const { return lambda_; }

 protected:
  double marginalImpl(const Prefix& p, WeightKind kind) const override {
    return weights_.marginal(p, kind, n_);
  }

 private:
  static Eigen::MatrixXcd randomFactors(unsigned n, std::uint64_t rank,
                                        std::uint64_t seed) {
    const auto N = static_cast<Eigen::Index>(dimension(checkQubitCount(n)));
    if (rank < 1 || static_cast<Eigen::Index>(rank) > N)
      throw UsageError("rank-r-psd: rank must be in [1, 2^n]");
    SplitMix64 rng(deriveSeed(seed, 0x72616E6B /* "rank" */));
    Eigen::MatrixXcd g(N, static_cast<Eigen::Index>(rank));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < N; ++i) {
        const auto [re, im] = detail::gaussianPair(rng);
        g(i, j) = Complex{re, im};
      }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() *
                         Eigen::MatrixXcd::Identity(N, static_cast<Eigen::Index>(rank));
    return q;
  }

  static Eigen::VectorXd randomEigenvalues(std::uint64_t rank,
                                           std::uint64_t seed, double scale) {
    if (!(scale > 0.0)) throw UsageError("rank-r-psd: scale must be positive");
    SplitMix64 rng(deriveSeed(seed, 0x6C616D62 /* "lamb" */));
    Eigen::VectorXd lam(static_cast<Eigen::Index>(rank));
    for (Eigen::Index k = 0; k < lam.size(); ++k)
      lam[k] = scale * rng.nextIn(0.25, 1.0);
    std::sort(lam.data(), lam.data() + lam.size(), std::greater<double>());
    return lam;
  }

  unsigned n_;
  Eigen::MatrixXcd factors_;
  Eigen::VectorXd lambda_;
  PrefixWeights weights_;
};

// ---------------------------------------------------------------------------
// Family dispatch.
// ---------------------------------------------------------------------------

struct FamilyParams {
  std::uint64_t rank = 3;      // rank-r-psd
  unsigned nnzPerRow = 5;      // random-sparse-*
  double scale = 1.0;          // all families
};

inline std::unique_ptr<RowOracle> builtinHamiltonian(
    const std::string& family, unsigned n, const FamilyParams& params = {},
    std::uint64_t seed = 0) {
  if (family == "inverse-diag")
    return std::make_unique<InverseDiagOracle>(n, params.scale);
  if (family == "laplacian-path")
    return std::make_unique<LaplacianPathOracle>(n, params.scale);
  if (family == "random-sparse-psd")
    return std::make_unique<RandomSparseOracle>(n, Mode::Psd, params.nnzPerRow,
                                                seed, params.scale);
  if (family == "random-sparse-hermitian")
    return std::make_unique<RandomSparseOracle>(n, Mode::Hermitian,
                                                params.nnzPerRow, seed,
                                                params.scale);
  if (family == "rank-r-psd")
    return std::make_unique<RankRPsdOracle>(n, params.rank, seed, params.scale);
  throw UsageError(
      "unknown family '" + family +
      "' (expected inverse-diag|random-sparse-psd|random-sparse-hermitian|"
      "rank-r-psd|laplacian-path)");
}

}  // namespace hamsim
