#include "msle/special.hpp"

namespace msle {

double regularized_gamma_p(double nu, double x) {
  if (!(nu > 0.0) || x < 0.0) throw std::domain_error("regularized_gamma_p: need nu > 0, x >= 0");
  if (x == 0.0) return 0.0;
  const double log_prefactor = nu * std::log(x) - x - std::lgamma(nu);
  if (x < nu + 1.0) {
    double term = 1.0 / nu;
    double sum = term;
    for (int n = 1; n < kHypergeometricTermCap; ++n) {
      term *= x / (nu + n);
      sum += term;
      if (term < 1e-17 * sum) return sum * std::exp(log_prefactor);
    }
    throw std::runtime_error("regularized_gamma_p: series did not converge");
  }
  // Lentz continued fraction for Q(ν, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - nu;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kHypergeometricTermCap; ++i) {
    const double an = -i * (i - nu);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) return 1.0 - std::exp(log_prefactor) * h;
  }
  throw std::runtime_error("regularized_gamma_p: continued fraction did not converge");
}

double gauss_2f1(const HypergeometricSpec& spec) {
  if (!(spec.tolerance >= 1e-14)) throw std::invalid_argument("gauss_2f1: tolerance below 1e-14");
  return Hypergeometric2F1<double>(spec.a, spec.b, spec.c, spec.tolerance)(spec.x);
}

ConnectionCoefficients connection_coefficients(int level) {
  if (level < 1) throw std::invalid_argument("connection_coefficients: level must be positive");
  const double q = 1.0 / (level + 2);
  const double g2 = gamma_fn(2 * q);
  return {2.0 * g2 * gamma_fn(-2 * q) / (gamma_fn(q) * gamma_fn(-q)),
          -2.0 * g2 * g2 / (gamma_fn(3 * q) * gamma_fn(q))};
}

}  // namespace msle
