#include "cra/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cra/quadrature.hpp"

namespace cra::kernels {

namespace {

void check_order(int k) {
  if (k < 1 || k > kMaxOrder)
    throw std::invalid_argument("kernel order must be in [1, " + std::to_string(kMaxOrder) +
                                "], got " + std::to_string(k));
}

double binomial(int n, int j) {
  double c = 1.0;
  for (int i = 1; i <= j; ++i) c = c * (n - j + i) / i;
  return c;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// sinc(x)^{2k} with sinc(x) = sin(x)/x; Taylor series near 0.
double sinc_power(double x, int k) {
  double s;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    s = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  } else {
    s = std::sin(x) / x;
  }
  return std::pow(s, 2 * k);
}

// Integral of (t - T) p(T) over [-w0, t], split at the filter knots.
double smooth_relu_quadrature(const SmoothingFilter& p, double t) {
  const auto& rule = quadrature::gauss_legendre_64();
  const double w0 = p.half_width();
  double total = 0.0;
  double lo = -w0;
  auto piece = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < quadrature::kGaussOrder; ++i) {
      const double T = mid + half * rule.nodes[i];
      sum += rule.weights[i] * (t - T) * p(T);
    }
    return half * sum;
  };
  for (double knot : p.knots()) {
    if (knot <= lo) continue;
    const double hi = std::min(knot, t);
    if (hi > lo) total += piece(lo, hi);
    lo = hi;
    if (lo >= t) break;
  }
  return total;
}

double filter_cdf_quadrature(const SmoothingFilter& p, double t) {
  const auto& rule = quadrature::gauss_legendre_64();
  const double w0 = p.half_width();
  double total = 0.0;
  double lo = -w0;
  for (double knot : p.knots()) {
    if (knot <= lo) continue;
    const double hi = std::min(knot, t);
    if (hi > lo) {
      const double half = 0.5 * (hi - lo);
      const double mid = 0.5 * (hi + lo);
      double sum = 0.0;
      for (std::size_t i = 0; i < quadrature::kGaussOrder; ++i)
        sum += rule.weights[i] * p(mid + half * rule.nodes[i]);
      total += half * sum;
    }
    lo = hi;
    if (lo >= t) break;
  }
  return total;
}

}  // namespace

double triangle_power_density(int k, double t) {
  check_order(k);
  const double x = k - std::abs(t);
  if (x <= 0.0) return 0.0;
  const int n = 2 * k;
  const int jmax = static_cast<int>(std::floor(x));
  double sum = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const double term = binomial(n, j) * std::pow(x - j, n - 1);
    sum += (j % 2 == 0) ? term : -term;
  }
  return std::max(0.0, sum / factorial(n - 1));
}

double triangle_power_fourier(int k, double xi) { return sinc_power(0.5 * xi, k); }

SmoothingFilter::SmoothingFilter(int k, double w0, double alpha0) : k_(k), w0_(w0), alpha0_(alpha0) {
  check_order(k);
  if (!(w0 > 0.0) || !(alpha0 > 0.0))
    throw std::invalid_argument("smoothing filter needs w0 > 0 and alpha0 > 0");
  const double limit =
      std::min(std::numbers::pi / (2.0 * alpha0), std::numbers::pi * k / (4.0 * alpha0));
  if (w0 > limit * (1.0 + 1e-15))
    throw std::invalid_argument("smoothing filter width violates w0 <= min(pi/(2 alpha0), pi k/(4 alpha0))");
  norm_const_ = triangle_power_fourier(k, alpha0 * w0 / k);
  knots_.reserve(2 * k + 1);
  for (int j = -k; j <= k; ++j) knots_.push_back(w0 * j / k);
}

double SmoothingFilter::operator()(double t) const {
  if (std::abs(t) >= w0_) return 0.0;
  const double scale = k_ / w0_;
  return std::cos(alpha0_ * t) * scale * triangle_power_density(k_, t * scale) / norm_const_;
}

double SmoothingFilter::fourier(double xi) const {
  const double s = w0_ / k_;
  return (triangle_power_fourier(k_, (xi + alpha0_) * s) + triangle_power_fourier(k_, (xi - alpha0_) * s)) /
         (2.0 * norm_const_);
}

double smooth_relu_slope(const SmoothingFilter& filter, double t) {
  if (t <= -filter.half_width()) return 0.0;
  if (t >= filter.half_width()) return 1.0;
  return filter_cdf_quadrature(filter, t);
}

// Cubic Hermite table of SReLU on [-w0, w0] with exact slopes at the knots.
class SmoothReluTable {
 public:
  static constexpr std::size_t kKnots = 4096;

  explicit SmoothReluTable(const SmoothingFilter& filter)
      : lo_(-filter.half_width()), step_(2.0 * filter.half_width() / (kKnots - 1)) {
    values_.resize(kKnots);
    slopes_.resize(kKnots);
    for (std::size_t i = 0; i < kKnots; ++i) {
      const double t = lo_ + step_ * static_cast<double>(i);
      values_[i] = i + 1 == kKnots ? filter.half_width() : (i == 0 ? 0.0 : smooth_relu_quadrature(filter, t));
      slopes_[i] = i + 1 == kKnots ? 1.0 : (i == 0 ? 0.0 : filter_cdf_quadrature(filter, t));
    }
  }

  double operator()(double t) const {
    const double u = (t - lo_) / step_;
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= kKnots - 1) i = kKnots - 2;
    const double s = u - static_cast<double>(i);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * values_[i] + h10 * step_ * slopes_[i] + h01 * values_[i + 1] + h11 * step_ * slopes_[i + 1];
  }

 private:
  double lo_;
  double step_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

Activation Activation::relu(double w0) {
  Activation a;
  a.w0_ = w0;
  return a;
}

Activation Activation::smooth_relu(int k, double w0, double alpha0) {
  if (k == 0) return relu(w0);
  Activation a;
  a.filter_ = std::make_shared<const SmoothingFilter>(k, w0, alpha0);
  a.w0_ = w0;
  return a;
}

Activation Activation::with_table() const {
  Activation a = *this;
  if (filter_ && !table_) a.table_ = std::make_shared<const SmoothReluTable>(*filter_);
  return a;
}

double Activation::exact(double t) const {
  if (!filter_) return std::max(0.0, t);
  const double w0 = filter_->half_width();
  if (t <= -w0) return 0.0;
  if (t >= w0) return t;
  return smooth_relu_quadrature(*filter_, t);
}

double Activation::operator()(double t) const {
  if (!filter_) return std::max(0.0, t);
  const double w0 = filter_->half_width();
  if (t <= -w0) return 0.0;
  if (t >= w0) return t;
  if (table_) return (*table_)(t);
  return smooth_relu_quadrature(*filter_, t);
}

double Activation::smoothed_triangle(double t, double T) const {
  const Activation& s = *this;
  return s(t - T) - 2.0 * s(t - 1.0 - w0_) + s(t - 2.0 - 2.0 * w0_ + T);
}

}  // namespace cra::kernels
