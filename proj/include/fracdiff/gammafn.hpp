#pragma once

#include <cmath>
#include <utility>

#include "fracdiff/errors.hpp"

namespace fracdiff {

/// Gamma-function helpers with explicit sign bookkeeping, so products and
/// ratios of Gamma values at negative non-integer arguments can be formed
/// from log magnitudes without overflow or sign loss.
namespace gammafn {

inline bool is_nonpositive_integer(double x, double tol = 1e-12) {
  return x <= tol && std::fabs(x - std::round(x)) < tol;
}

/// log|Gamma(x)| together with sign(Gamma(x)). Throws Pole at 0, -1, -2, ...
inline std::pair<double, int> log_abs_gamma(double x) {
  if (is_nonpositive_integer(x)) {
    throw Pole("Gamma pole at x = " + std::to_string(x));
  }
  if (x > 0.0) {
    return {std::lgamma(x), 1};
  }
  // Gamma alternates sign on the negative axis: negative on (-1,0),
  // positive on (-2,-1), and so on.
  const long k = static_cast<long>(std::floor(x));
  const int sign = (k % 2 == 0) ? 1 : -1;
  return {std::lgamma(x), sign};
}

/// Signed product of Gamma values given as (numerators, denominators).
/// Arguments are combined in log space.
template <std::size_t Nn, std::size_t Nd>
inline double gamma_ratio(const double (&num)[Nn], const double (&den)[Nd]) {
  double log_mag = 0.0;
  int sign = 1;
  for (double a : num) {
    auto [lg, s] = log_abs_gamma(a);
    log_mag += lg;
    sign *= s;
  }
  for (double a : den) {
    auto [lg, s] = log_abs_gamma(a);
    log_mag -= lg;
    sign *= s;
  }
  return sign * std::exp(log_mag);
}

}  // namespace gammafn
}  // namespace fracdiff
