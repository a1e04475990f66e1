#pragma once

// Survival functions by direct numerical integration of the densities.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace voxmetric::oracle {

template <typename F>
double upper_tail(F density, double from) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(density, from, std::numeric_limits<double>::infinity(), 1e-14);
}

inline double chi2_survival_quad(double x, double df) {
  const double k = df / 2.0;
  const double log_norm = -k * std::log(2.0) - std::lgamma(k);
  return upper_tail([&](double t) { return t <= 0 ? 0.0 : std::exp(log_norm + (k - 1) * std::log(t) - t / 2); }, x);
}

inline double normal_survival_quad(double z) {
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  if (z < 0) return 1.0 - normal_survival_quad(-z);
  return upper_tail([&](double t) { return c * std::exp(-0.5 * t * t); }, z);
}

inline double student_t_survival_quad(double t, double nu) {
  const double log_norm =
      std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(nu * std::numbers::pi);
  auto density = [&](double s) { return std::exp(log_norm - (nu + 1) / 2 * std::log1p(s * s / nu)); };
  if (t < 0) return 1.0 - upper_tail(density, -t);
  return upper_tail(density, t);
}

}  // namespace voxmetric::oracle
