#pragma once

// Named initial-condition families, written "<name>[:<amplitude>]":
//   cosine:a  ->  1 + a cos x
//   bump:a    ->  a (1 + cos x)^8 / mean((1 + cos x)^8), so the mean is a
//   expcos    ->  exp(cos x)

#include <cmath>
#include <string>
#include <string_view>

#include "fracks/errors.hpp"
#include "fracks/torus_field.hpp"

namespace fracks {

inline constexpr int kBumpPower = 8;

namespace detail {

/// mean of (1 + cos x)^m over a period: binom(2m, m) / 2^m.
inline double bump_mean(int m) {
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * (m + i) / i;
  return c / std::ldexp(1.0, m);
}

inline double parse_amplitude(std::string_view text, std::string_view spec) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double a = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(a)) throw std::invalid_argument("trailing");
    return a;
  } catch (const std::exception&) {
    throw DomainError("initial condition '" + std::string(spec) + "': bad amplitude");
  }
}

}  // namespace detail

inline Field cosine_ic(const TorusGrid& g, double a) {
  return Field::sample(g, [a](double x) { return 1.0 + a * std::cos(x); });
}

/// Concentrated bump centred at x = 0 with mean a and peak about 5.09 a.
inline Field bump_ic(const TorusGrid& g, double a, int power = kBumpPower) {
  const double norm = detail::bump_mean(power);
  return Field::sample(g, [a, power, norm](double x) { return a * std::pow(1.0 + std::cos(x), power) / norm; });
}

inline Field expcos_ic(const TorusGrid& g) {
  return Field::sample(g, [](double x) { return std::exp(std::cos(x)); });
}

/// Parse a family spec such as "bump:5" and sample it on g.
inline Field make_initial_condition(std::string_view spec, const TorusGrid& g) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  const std::string_view arg = has_arg ? spec.substr(colon + 1) : std::string_view{};
  if (name == "expcos") {
    if (has_arg) throw DomainError("initial condition 'expcos' takes no amplitude");
    return expcos_ic(g);
  }
  if (!has_arg) throw DomainError("initial condition '" + std::string(spec) + "' needs ':<amplitude>'");
  const double a = detail::parse_amplitude(arg, spec);
  if (name == "cosine") {
    if (std::abs(a) > 1.0) throw DomainError("cosine:a needs |a| <= 1 for nonnegative data");
    return cosine_ic(g, a);
  }
  if (name == "bump") {
    if (a < 0.0) throw DomainError("bump:a needs a >= 0");
    return bump_ic(g, a);
  }
  throw DomainError("unknown initial condition '" + std::string(name) + "' (expected cosine|bump|expcos)");
}

}  // namespace fracks
