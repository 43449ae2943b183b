#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace cra::quadrature {

inline constexpr std::size_t kGaussOrder = 64;

struct GaussRule {
  std::array<double, kGaussOrder> nodes;    // on [-1, 1], ascending
  std::array<double, kGaussOrder> weights;
};

/// 64-point Gauss-Legendre rule, computed once by Newton iteration on P_64.
const GaussRule& gauss_legendre_64();

/// Integral of f over [a, b] with one 64-point panel.
double integrate(const std::function<double(double)>& f, double a, double b);

/// Integral over [a, b] split at the given interior breakpoints (sorted or
/// not; points outside (a, b) are ignored), `panels` equal panels per piece.
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, std::size_t panels = 1);

}  // namespace cra::quadrature
