#include "cra/reps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "cra/linalg.hpp"
#include "cra/quadrature.hpp"
#include "cra/rng.hpp"

namespace cra::reps {

namespace {

// sigma(u) and its first two derivatives on (0, 1). Writing
// g(u) = 1/u - 1/(1 - u) gives sigma = 1 / (1 + e^g) and
//   sigma'  = -g' sigma (1 - sigma),
//   sigma'' = -g'' sigma (1 - sigma) - g' sigma' (1 - 2 sigma),
// with g' = -1/u^2 - 1/(1-u)^2 and g'' = 2/u^3 - 2/(1-u)^3.
std::array<double, 3> transition(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  const double v = 1.0 - u;
  const double g = 1.0 / u - 1.0 / v;
  const double s = 1.0 / (1.0 + std::exp(g));
  const double sc = 1.0 / (1.0 + std::exp(-g));  // 1 - s without cancellation
  const double g1 = -1.0 / (u * u) - 1.0 / (v * v);
  const double g2 = 2.0 / (u * u * u) - 2.0 / (v * v * v);
  const double s1 = -g1 * s * sc;
  const double s2 = -g2 * s * sc - g1 * s1 * (sc - s);
  return {s, s1, s2};
}

}  // namespace

double bump(double t, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 2) throw std::invalid_argument("bump: deriv_order must be 0, 1 or 2");
  const auto tr = transition(2.0 - std::abs(t));
  switch (deriv_order) {
    case 0:
      return tr[0];
    case 1:
      // d/dt sigma(2 - |t|) = -sign(t) sigma'(u); sigma' vanishes near t = 0.
      return t > 0.0 ? -tr[1] : tr[1];
    default:
      return tr[2];
  }
}

double bump_sup_norm(int order) {
  static const std::array<double, 3> norms = [] {
    std::array<double, 3> out{1.0, 0.0, 0.0};
    constexpr int n = 200000;
    for (int i = 1; i < n; ++i) {
      const auto tr = transition(static_cast<double>(i) / n);
      out[1] = std::max(out[1], std::abs(tr[1]));
      out[2] = std::max(out[2], std::abs(tr[2]));
    }
    return out;
  }();
  if (order < 0 || order > 2) throw std::invalid_argument("bump_sup_norm: order must be 0, 1 or 2");
  return norms[order];
}

double h_second_deriv(CosineWeight w, double T) {
  const double u = 2.0 - std::abs(T);
  if (u <= 0.0) return 0.0;
  const double g0 = bump(T, 0);
  const double g1 = bump(T, 1);
  const double g2 = bump(T, 2);
  const double phase = w.alpha * T + w.psi;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  return g2 * c - 2.0 * w.alpha * g1 * s - w.alpha * w.alpha * g0 * c;
}

double h_second_deriv_bound(CosineWeight w) {
  // The grid-measured sup norms may undershoot the true maxima slightly.
  return (bump_sup_norm(2) + 2.0 * std::abs(w.alpha) * bump_sup_norm(1)) * (1.0 + 1e-6) + w.alpha * w.alpha;
}

double cosine_repr_check(CosineWeight w, double t, std::size_t n_nodes) {
  if (std::abs(t) > 1.0) throw std::invalid_argument("cosine_repr_check: t must lie in [-1, 1]");
  // ReLU(t - T) vanishes for T > t; pieces [-2, -1], [-1, t].
  const std::array<double, 1> breaks{-1.0};
  const std::size_t pieces = t > -1.0 ? 2 : 1;
  const std::size_t panels =
      std::max<std::size_t>(1, (n_nodes + quadrature::kGaussOrder * pieces - 1) / (quadrature::kGaussOrder * pieces));
  return quadrature::integrate_piecewise(
      [w, t](double T) { return h_second_deriv(w, T) * (t - T); }, -2.0, t, breaks, panels);
}

McEstimate cosine_repr_mc(CosineWeight w, double t, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("cosine_repr_mc: n_samples must be positive");
  if (std::abs(t) > 1.0) throw std::invalid_argument("cosine_repr_mc: t must lie in [-1, 1]");
  Engine engine = make_engine(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<double> values(n_samples);
  for (double& v : values) {
    const double T = unif(engine);
    v = 4.0 * h_second_deriv(w, T) * std::max(0.0, t - T);
  }
  McEstimate est;
  const double n = static_cast<double>(n_samples);
  est.mean = pairwise_sum(values) / n;
  if (n_samples == 1) {
    est.std_error = std::numeric_limits<double>::infinity();
    return est;
  }
  for (double& v : values) v = (v - est.mean) * (v - est.mean);
  est.std_error = std::sqrt(pairwise_sum(values) / (n - 1.0) / n);
  return est;
}

}  // namespace cra::reps
