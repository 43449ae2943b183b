#pragma once

// ReLU integral representation of cosines on [-1, 1].
//
// With a smooth bump gamma (1 on [-1, 1], 0 outside (-2, 2)) and
// h(t) = gamma(t) cos(alpha t + psi), integrating by parts twice gives
//
//   h(t) = integral_{-2}^{2} h''(T) ReLU(t - T) dT,
//
// so cos(alpha t + psi) = E[4 h''(T) ReLU(t - T)] for T ~ Unif[-2, 2] and
// every t in [-1, 1].

#include <cstddef>
#include <cstdint>

namespace cra::reps {

/// Bump gamma(t) = sigma(2 - |t|) with sigma(u) = rho(u) / (rho(u) + rho(1 - u))
/// and rho(u) = exp(-1/u) for u > 0, else 0. deriv_order in {0, 1, 2}.
double bump(double t, int deriv_order = 0);

/// sup |gamma^{(order)}| for order in {0, 1, 2}, measured once on a fine grid.
double bump_sup_norm(int order);

struct CosineWeight {
  double alpha = 0.0;
  double psi = 0.0;
};

/// h''(T) = gamma'' cos(alpha T + psi) - 2 alpha gamma' sin(alpha T + psi)
///          - alpha^2 gamma cos(alpha T + psi).
double h_second_deriv(CosineWeight w, double T);

/// Envelope |h''| <= ||gamma''|| + 2 |alpha| ||gamma'|| + alpha^2.
double h_second_deriv_bound(CosineWeight w);

/// Quadrature value of integral_{-2}^{2} h''(T) ReLU(t - T) dT using about
/// n_nodes Gauss-Legendre nodes. Throws std::invalid_argument for |t| > 1.
double cosine_repr_check(CosineWeight w, double t, std::size_t n_nodes = 2048);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // +inf for a single sample
};

/// Monte-Carlo mean of 4 h''(T) ReLU(t - T), T ~ Unif[-2, 2].
McEstimate cosine_repr_mc(CosineWeight w, double t, std::size_t n_samples, std::uint64_t seed);

}  // namespace cra::reps
