#pragma once

#include <cstddef>

// Real-argument special functions used throughout the solver. All functions are
// pure and throw hilfer::DomainError on arguments outside their stated domain.
namespace hilfer::specfun {

/// Gamma function for x > 0 (Lanczos, g = 7, 9 coefficients).
double gamma_fn(double x);

/// Natural log of gamma for x > 0.
double log_gamma(double x);

/// Complete beta B(a, b) = Γ(a)Γ(b)/Γ(a+b), a, b > 0.
double beta_fn(double a, double b);

/// Regularized incomplete beta I_z(a, b) in [0, 1].
double inc_beta_regularized(double z, double a, double b);

/// Unregularized incomplete beta B_z(a, b) = ∫_0^z θ^{a-1}(1-θ)^{b-1} dθ.
double inc_beta(double z, double a, double b);

/// Continued-fraction factor of the incomplete beta expansion, such that
/// B_z(a, b) = z^a (1-z)^b / a * inc_beta_cf(z, a, b) whenever
/// z < (a + 1) / (a + b + 2). Exposed for callers that need to fold the
/// z^a prefactor into other powers without overflow.
double inc_beta_cf(double z, double a, double b);

/// Truncated Mittag-Leffler series E_α(z) = Σ_{j < n_terms} z^j / Γ(jα + 1).
/// Throws OverflowError if a term is not finite.
double mittag_leffler(double alpha, double z, std::size_t n_terms);

}  // namespace hilfer::specfun
