#pragma once

// Triangle-convolution kernels, the cosine-regularized smoothing filter and
// the smoothed ReLU activations built from it.
//
// lambda_k is the k-fold self-convolution of the unit triangle 1 - |t| on
// [-1, 1]. Since the triangle is the density of a sum of two Unif[-1/2, 1/2]
// variables, lambda_k is the centered Irwin-Hall density of 2k uniforms and
// has the closed form
//
//   lambda_k(t) = 1/(2k-1)! * sum_{j=0}^{floor(x)} (-1)^j C(2k, j) (x - j)^(2k-1),
//   x = k - |t|,
//
// with knots at the integers of [-k, k]. The alternating sum loses accuracy
// as k grows, so orders are capped at kMaxOrder.

#include <memory>
#include <numbers>
#include <vector>

namespace cra::kernels {

inline constexpr int kMaxOrder = 8;
inline constexpr double kDefaultHalfWidth = 0.5;
inline constexpr double kDefaultAlpha0 = std::numbers::pi / 16.0;

/// lambda_k(t). Throws std::invalid_argument unless 1 <= k <= kMaxOrder.
double triangle_power_density(int k, double t);

/// Fourier transform of lambda_k: sin^{2k}(xi/2) / (xi/2)^{2k}, equal to 1 at 0.
double triangle_power_fourier(int k, double xi);

/// Cosine-regularized, rescaled triangle kernel
///   p(t) = cos(alpha0 t) (k/w0) lambda_k(t k / w0) / C,
/// a probability density on [-w0, w0] whose Fourier transform never vanishes.
class SmoothingFilter {
 public:
  /// Requires 1 <= k <= kMaxOrder, w0 > 0, alpha0 > 0 and
  /// w0 <= min(pi / (2 alpha0), pi k / (4 alpha0)).
  explicit SmoothingFilter(int k, double w0 = kDefaultHalfWidth, double alpha0 = kDefaultAlpha0);

  int order() const { return k_; }
  double half_width() const { return w0_; }
  double alpha0() const { return alpha0_; }

  /// C = integral of cos(alpha0 T) lambda_{k,w0}(T) dT. Evaluated in closed
  /// form as the Fourier transform of lambda_{k,w0} at alpha0.
  double norm_const() const { return norm_const_; }

  double operator()(double t) const;

  /// (1 / 2C) [Lambda_k((xi + alpha0) w0 / k) + Lambda_k((xi - alpha0) w0 / k)].
  double fourier(double xi) const;

  /// Breakpoints w0 j / k, j = -k..k, where the density is not smooth.
  const std::vector<double>& knots() const { return knots_; }

 private:
  int k_;
  double w0_;
  double alpha0_;
  double norm_const_;
  std::vector<double> knots_;
};

class SmoothReluTable;

/// ReLU (order 0) or SReLU_k = ReLU convolved with a SmoothingFilter.
/// Immutable; copies share the filter and the optional lookup table.
class Activation {
 public:
  static Activation relu(double w0 = kDefaultHalfWidth);
  /// k = 0 yields plain ReLU.
  static Activation smooth_relu(int k, double w0 = kDefaultHalfWidth,
                                double alpha0 = kDefaultAlpha0);

  /// Copy of this activation that evaluates through a 4096-knot cubic Hermite
  /// table on (-w0, w0). Maximum deviation from quadrature is below 1e-8.
  Activation with_table() const;

  int order() const { return filter_ ? filter_->order() : 0; }
  bool is_relu() const { return !filter_; }
  bool has_table() const { return static_cast<bool>(table_); }
  /// Null for ReLU.
  const SmoothingFilter* filter() const { return filter_.get(); }
  /// w0 of the activation family. ReLU keeps the nominal w0 so that the
  /// smoothed triangle of order 0 is the plain ReLU triangle.
  double half_width() const { return w0_; }

  double operator()(double t) const;

  /// Direct quadrature value, bypassing the table.
  double exact(double t) const;

  /// Smoothed triangle S(t - T) - 2 S(t - 1 - w0) + S(t - 2 - 2 w0 + T),
  /// supported on [T - w0, 2 + 3 w0 - T]. Intended for T <= 1 + w0.
  double smoothed_triangle(double t, double T) const;

 private:
  std::shared_ptr<const SmoothingFilter> filter_;
  std::shared_ptr<const SmoothReluTable> table_;
  double w0_ = kDefaultHalfWidth;
};

/// Derivative of SReLU_k, the filter CDF P(T <= t).
double smooth_relu_slope(const SmoothingFilter& filter, double t);

}  // namespace cra::kernels
