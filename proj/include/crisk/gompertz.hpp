#pragma once

#include <cmath>
#include <limits>

#include "crisk/types.hpp"

namespace crisk {

/**
 * Gompertz hazard lambda(t) = scale * exp(shape * t); shape = 0 degenerates
 * to the exponential. Cumulative hazard H(t) = scale*(exp(shape*t)-1)/shape
 * (scale*t at shape = 0).
 */
struct GompertzParams {
  double scale = 0;  // a >= 0, hazard level at t = 0
  double shape = 0;  // b >= 0, exponential growth rate

  GompertzParams() = default;
  GompertzParams(double a, double b) : scale(a), shape(b) {
    if (!(a >= 0) || !std::isfinite(a)) throw DataError("gompertz scale must be >= 0");
    if (!(b >= 0) || !std::isfinite(b)) throw DataError("gompertz shape must be >= 0");
  }
};

inline double gompertz_hazard(const GompertzParams& p, double t) {
  return p.scale * std::exp(p.shape * t);
}

inline double gompertz_cumhaz(const GompertzParams& p, double t) {
  if (t <= 0) return 0;
  if (p.shape == 0) return p.scale * t;
  return p.scale * std::expm1(p.shape * t) / p.shape;  // overflows to +inf harmlessly
}

// Time at which the cumulative hazard reaches h (inverse of gompertz_cumhaz).
inline double gompertz_inv_cumhaz(const GompertzParams& p, double h) {
  if (h <= 0) return 0;
  if (p.scale == 0) return std::numeric_limits<double>::infinity();
  if (p.shape == 0) return h / p.scale;
  return std::log1p(h * p.shape / p.scale) / p.shape;
}

inline double gompertz_cdf(const GompertzParams& p, double t) {
  if (t <= 0) return 0;
  return -std::expm1(-gompertz_cumhaz(p, t));
}

inline double gompertz_pdf(const GompertzParams& p, double t) {
  if (t < 0) return 0;
  // a * exp(b t) * exp(-H(t)); the exponent goes to -inf in the far tail.
  return p.scale * std::exp(p.shape * t - gompertz_cumhaz(p, t));
}

// Inverse-cumulative-hazard sampling: returns T with H(T) = -ln(u).
inline double sample_gompertz(const GompertzParams& p, double u) {
  if (!(u > 0 && u < 1)) throw DataError("sample_gompertz: u must lie in (0, 1)");
  if (p.scale == 0) throw NumericError("degenerate hazard: gompertz scale is 0");
  return gompertz_inv_cumhaz(p, -std::log(u));
}

}  // namespace crisk
