#pragma once

namespace luba {

/// Exponential integral Ei(x) = PV integral of e^t/t from -inf to x.
/// Defined here for x > 0 only. Power series up to x = 40, asymptotic
/// expansion beyond; relative error a few ulp across the range.
double exponential_integral_ei(double x);

/// Principal-value logarithmic integral li(z), z > 1, evaluated as Ei(ln z).
/// Absolute error below 1e-8 for z in (1, 1e6]. Throws DomainError for
/// z <= 1 + 1e-12 (the integrand is singular at t = 1).
double log_integral(double z);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Chi-square CDF with dof degrees of freedom.
double chi_square_cdf(double x, double dof);

/// Inverse of chi_square_cdf in x; p in (0, 1).
double chi_square_quantile(double p, double dof);

}  // namespace luba
