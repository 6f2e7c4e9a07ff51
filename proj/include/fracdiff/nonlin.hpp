#pragma once

#include <cmath>

#include "fracdiff/errors.hpp"

namespace fracdiff {

/// Floor applied when probing Phi at values that may have rounded to zero.
inline constexpr double kPhiFloor = 1e-300;

/// The singular diffusion law Phi_n(u) = -u^(-n) for n > 0, with n = 0
/// dispatching to the logarithmic case Phi_0(u) = log u.
struct Nonlinearity {
  double n = 0.0;

  explicit Nonlinearity(double n_) : n(n_) {
    if (n < 0.0) throw Error("Nonlinearity: n must be >= 0");
  }

  bool logarithmic() const { return n == 0.0; }

  double phi(double u) const {
    if (u <= 0.0) throw NonpositiveArgument("phi requires u > 0");
    return logarithmic() ? std::log(u) : -std::pow(u, -n);
  }

  double phi_prime(double u) const {
    if (u <= 0.0) throw NonpositiveArgument("phi_prime requires u > 0");
    return logarithmic() ? 1.0 / u : n * std::pow(u, -n - 1.0);
  }

  /// Phi evaluated with the positivity floor, for diagnostics that probe
  /// limit solutions near zero.
  double phi_floored(double u) const { return phi(std::max(u, kPhiFloor)); }

  /// Inverse of Phi: B(w) = Phi^{-1}(w).
  double phi_inverse(double w) const {
    if (logarithmic()) return std::exp(w);
    if (w >= 0.0) throw OutOfRange("phi_inverse: w must be negative for n > 0");
    return std::pow(-w, -1.0 / n);
  }
};

/// The epsilon-shifted regularization Phi_eps(v) = Phi(v + eps) - Phi(eps),
/// smooth and nonsingular on [0, inf) with Phi_eps(0) = 0.
struct RegularizedNonlinearity {
  Nonlinearity base;
  double eps = 0.0;

  RegularizedNonlinearity(Nonlinearity nl, double eps_) : base(nl), eps(eps_) {
    if (eps <= 0.0) throw Error("RegularizedNonlinearity: eps must be positive");
  }

  double phi_eps(double v) const {
    if (v < 0.0) throw NegativeArgument("phi_eps requires v >= 0");
    return base.phi(v + eps) - base.phi(eps);
  }

  double phi_eps_prime(double v) const {
    if (v < 0.0) throw NegativeArgument("phi_eps_prime requires v >= 0");
    return base.phi_prime(v + eps);
  }
};

}  // namespace fracdiff
