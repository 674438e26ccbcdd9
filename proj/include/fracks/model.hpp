#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "fracks/errors.hpp"
#include "fracks/spectral_ops.hpp"

namespace fracks {

/// One instance of
///   u_t = -Lambda^alpha u - eps Lambda^1.75 u + chi (u B(u))_x + r u (1 - u).
struct ModelParams {
  double alpha = 1.0;
  double beta = 2.0;
  double chi = 1.0;
  double r = 1.0;
  double epsilon = 0.0;
  DriftVariant variant = DriftVariant::Helmholtz;

  /// Order of the hyperviscous regularization switched on by epsilon > 0.
  static constexpr double kRegularizationOrder = 1.75;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (!(beta > 0.0)) throw DomainError("beta must be > 0, got " + std::to_string(beta));
    if (!(chi >= 0.0)) throw DomainError("chi must be >= 0, got " + std::to_string(chi));
    if (!(r >= 0.0)) throw DomainError("r must be >= 0, got " + std::to_string(r));
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0, got " + std::to_string(epsilon));
  }

  /// s = min(r / (chi - r), 1), defined when chi > r > 0.
  std::optional<double> s_exponent() const {
    if (!(chi > r) || !(r > 0.0)) return std::nullopt;
    return std::min(r / (chi - r), 1.0);
  }

  /// Diffusion order above which smooth global solutions are known: max(1 - r/chi, 0).
  double alpha_star_strong() const {
    if (chi <= 0.0) return 0.0;
    return std::max(1.0 - r / chi, 0.0);
  }

  /// Diffusion order above which global weak solutions are known:
  /// 1 - min(r/(chi - r), 1) for r < chi/2, else 0.
  double alpha_star_weak() const {
    if (!(r < chi / 2.0)) return 0.0;
    return 1.0 - std::min(r / (chi - r), 1.0);
  }
};

}  // namespace fracks
