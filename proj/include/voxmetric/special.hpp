#pragma once

namespace voxmetric::special {

// Upper-tail probabilities used by the hypothesis tests. Each throws
// DomainError outside its domain (negative or NaN statistic where not
// allowed, non-positive degrees of freedom).

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, 0 <= x <= 1.
double beta_i(double a, double b, double x);

/// P(X > x) for X ~ chi-square(df).
double chi2_survival(double x, double df);

/// P(Z > z) for a standard normal Z.
double normal_survival(double z);

/// P(T > t) for T ~ Student-t(df).
double student_t_survival(double t, double df);

}  // namespace voxmetric::special
