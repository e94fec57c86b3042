#ifndef MSLE_SPECIAL_HPP
#define MSLE_SPECIAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace msle {

/// True when x is 0, −1, −2, …
template <typename Scalar>
bool is_nonpositive_integer(Scalar x) {
  return x <= Scalar(0) && x == std::round(x);
}

/// Γ(x). Throws std::domain_error at the poles.
template <typename Scalar>
Scalar gamma_fn(Scalar x) {
  if (is_nonpositive_integer(x)) throw std::domain_error("gamma_fn: pole at non-positive integer");
  return std::tgamma(x);
}

/// 1/Γ(x), zero at the poles.
template <typename Scalar>
Scalar reciprocal_gamma(Scalar x) {
  if (is_nonpositive_integer(x)) return Scalar(0);
  return Scalar(1) / std::tgamma(x);
}

/// Regularized lower incomplete gamma P(ν, x) for ν > 0, x ≥ 0.
double regularized_gamma_p(double nu, double x);

/// Parameters of ₂F₁(a, b; c; x) on the open unit interval.
struct HypergeometricSpec {
  double a;
  double b;
  double c;
  double x;
  double tolerance = 1e-14;
};

inline constexpr int kHypergeometricTermCap = 10000;

/// Power series Σ (a)_n (b)_n / ((c)_n n!) x^n, summed until the terms fall
/// below tolerance relative to the partial sum. Throws std::runtime_error
/// after kHypergeometricTermCap terms.
template <typename Scalar>
Scalar hypergeometric_series(Scalar a, Scalar b, Scalar c, Scalar x, Scalar tolerance) {
  Scalar term(1);
  Scalar sum(1);
  int small_terms = 0;
  for (int n = 0; n < kHypergeometricTermCap; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x;
    sum += term;
    if (term == Scalar(0)) return sum;
    if (std::abs(term) <= tolerance * std::abs(sum)) {
      // two consecutive small terms guard against an accidental near-zero
      if (++small_terms == 2) return sum;
    } else {
      small_terms = 0;
    }
  }
  throw std::runtime_error("hypergeometric_series: no convergence within the term cap");
}

/// ₂F₁(a, b; c; ·) with the x → 1 − x connection coefficients precomputed,
/// for repeated evaluation at many arguments.
///
/// x ≤ 1/2 sums the series at x. Above 1/2 the standard connection formula
/// re-expands around x = 1:
///   ₂F₁(a,b;c;x) = A ₂F₁(a,b;a+b−c+1;1−x)
///                + B (1−x)^{c−a−b} ₂F₁(c−a,c−b;c−a−b+1;1−x)
/// with A = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)), B = Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)).
/// When c − a − b is an integer this formula degenerates (logarithmic case);
/// the evaluator then falls back to the Euler transform
///   ₂F₁(a,b;c;x) = (1−x)^{c−a−b} ₂F₁(c−a,c−b;c;x)
/// summed at x, which converges slowly near 1 and may hit the term cap.
template <typename Scalar>
class Hypergeometric2F1 {
 public:
  Hypergeometric2F1(Scalar a, Scalar b, Scalar c, Scalar tolerance = Scalar(1e-15))
      : a_(a), b_(b), c_(c), tol_(tolerance) {
    if (is_nonpositive_integer(c)) throw std::domain_error("2F1: c is a non-positive integer");
    // grouped so that swapping a and b is bit-exact
    const Scalar s = c - (a + b);
    log_case_ = s == std::round(s);
    if (!log_case_) {
      front_ = (gamma_fn(c) * gamma_fn(s)) * (reciprocal_gamma(c - a) * reciprocal_gamma(c - b));
      back_ = (gamma_fn(c) * gamma_fn(-s)) * (reciprocal_gamma(a) * reciprocal_gamma(b));
    }
  }

  Scalar a() const { return a_; }
  Scalar b() const { return b_; }
  Scalar c() const { return c_; }

  Scalar operator()(Scalar x) const {
    if (!(x >= Scalar(0) && x < Scalar(1)))
      throw std::domain_error("2F1: argument outside [0, 1)");
    if (x == Scalar(0)) return Scalar(1);
    if (x <= Scalar(0.5)) return hypergeometric_series(a_, b_, c_, x, tol_);
    const Scalar s = c_ - (a_ + b_);
    const Scalar y = Scalar(1) - x;
    if (log_case_)
      return std::pow(y, s) * hypergeometric_series(c_ - a_, c_ - b_, c_, x, tol_);
    Scalar out(0);
    if (front_ != Scalar(0)) out += front_ * hypergeometric_series(a_, b_, (a_ + b_) - c_ + 1, y, tol_);
    if (back_ != Scalar(0))
      out += back_ * std::pow(y, s) * hypergeometric_series(c_ - a_, c_ - b_, s + 1, y, tol_);
    return out;
  }

  /// d/dx ₂F₁(a,b;c;x) = (ab/c) ₂F₁(a+1,b+1;c+1;x).
  Hypergeometric2F1 derivative_function() const {
    return Hypergeometric2F1(a_ + 1, b_ + 1, c_ + 1, tol_);
  }
  Scalar derivative_factor() const { return a_ * b_ / c_; }

 private:
  Scalar a_, b_, c_, tol_;
  bool log_case_ = false;
  Scalar front_{0};
  Scalar back_{0};
};

/// One-shot evaluation on [0, 1). Throws std::invalid_argument for a
/// tolerance below 1e−14, std::domain_error for x outside [0, 1) or c a
/// non-positive integer, std::runtime_error on non-convergence.
double gauss_2f1(const HypergeometricSpec& spec);

struct ConnectionCoefficients {
  double c_minus;
  double c_plus;
};

/// c_− = 2Γ(2q)Γ(−2q) / (Γ(q)Γ(−q)), c_+ = −2Γ(2q)² / (Γ(3q)Γ(q)), q = 1/(k+2).
ConnectionCoefficients connection_coefficients(int level);

}  // namespace msle

#endif
