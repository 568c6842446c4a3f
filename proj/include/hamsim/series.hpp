#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/numeric.hpp"
#include "hamsim/types.hpp"

namespace hamsim {

/// Which remainder of the exponential split the series represents:
///   CosRemainder: f(x) = (cos sqrt(x) - 1) / x
///   SinRemainder: g(x) = (sin sqrt(x) - sqrt(x)) / x^(3/2)
/// so that e^{ix} = 1 + ix + f(x^2) x^2 + i g(x^2) x^3.
enum class SeriesKind { CosRemainder, SinRemainder };

/// Order-K truncation of f or g:
///   f_K(x) = sum_{j=0}^{K} (-1)^{j+1} x^j / (2j+2)!
///   g_K(x) = sum_{j=0}^{K} (-1)^{j+1} x^j / (2j+3)!
/// Coefficients are built by the stable ratio recurrence and kept in
/// double-double precision: the monomial basis is so ill-conditioned at
/// large argument (condition ~ cosh(sqrt(y))) that plain double coefficients
/// alone cost ~1e-9 absolute error at y = 400.
class TruncatedSeries {
 public:
  static TruncatedSeries cosRemainder(std::uint64_t K) {
    return TruncatedSeries(SeriesKind::CosRemainder, K);
  }
  static TruncatedSeries sinRemainder(std::uint64_t K) {
    return TruncatedSeries(SeriesKind::SinRemainder, K);
  }

  SeriesKind kind() const { return kind_; }
  std::uint64_t order() const { return coeffs_.size() - 1; }

  /// Coefficients c_0..c_K rounded to double (tests, diagnostics).
  std::vector<double> coefficients() const {
    std::vector<double> c;
    c.reserve(coeffs_.size());
    for (const DoubleDouble& d : coeffs_) c.push_back(d.value());
    return c;
  }

  /// Scalar evaluation by compensated (double-double) Horner.  Accurate to
  /// ~eps * |result| even deep in the cancellation regime (y up to ~400).
  double evalScalar(double y) const {
    DoubleDouble r = coeffs_.back();
    for (std::size_t j = coeffs_.size() - 1; j-- > 0;)
      r = ddAdd(ddMul(r, y), coeffs_[j]);
    return r.value();
  }

 private:
  TruncatedSeries(SeriesKind kind, std::uint64_t K) : kind_(kind) {
    coeffs_.reserve(K + 1);
    DoubleDouble c = kind == SeriesKind::CosRemainder
                         ? DoubleDouble{-0.5, 0.0}
                         : ddDiv(DoubleDouble{-1.0, 0.0}, 6.0);
    coeffs_.push_back(c);
    for (std::uint64_t j = 0; j < K; ++j) {
      const double den = kind == SeriesKind::CosRemainder
                             ? static_cast<double>((2 * j + 3) * (2 * j + 4))
                             : static_cast<double>((2 * j + 4) * (2 * j + 5));
      c = ddNeg(ddDiv(c, den));
      coeffs_.push_back(c);
    }
  }

  SeriesKind kind_;
  std::vector<DoubleDouble> coeffs_;
};

/// Horner evaluation of series(Bscaled) * x using exactly K matrix-vector
/// products.  Bscaled is the (small, Hermitian) scaled Gram matrix; the
/// matrix path is plain double — its rounding is far below the sketch noise
/// it feeds.  Throws NumericalError naming the first non-finite term.
inline Eigen::VectorXcd evalSeries(const TruncatedSeries& series,
                                   const Eigen::MatrixXcd& Bscaled,
                                   const Eigen::VectorXcd& x) {
  if (Bscaled.rows() != Bscaled.cols())
    throw UsageError("evalSeries: matrix must be square");
  if (Bscaled.rows() != x.size())
    throw UsageError("evalSeries: dimension mismatch between matrix (" +
                     std::to_string(Bscaled.rows()) + ") and vector (" +
                     std::to_string(x.size()) + ")");
  const std::vector<double> c = series.coefficients();
  Eigen::VectorXcd r = c.back() * x;
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    r = (Bscaled * r).eval();
    r += c[j] * x;
    if (!r.allFinite())
      throw NumericalError("evalSeries: non-finite values at term " +
                           std::to_string(j));
  }
  return r;
}

}  // namespace hamsim
