#pragma once

// Function-independent random features and outer-layer fitting.
//
// Hidden units are SReLU_k(<omega, x> / r - T) with omega uniform on the unit
// sphere of a q-dimensional coordinate subspace and T drawn from
// mu_l(dT) ~ dT / (1 + T^{2l}). Only the outer coefficients are trained, by
// constant-step gradient descent on the mean squared error, which is convex.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cra/kernels.hpp"
#include "cra/linalg.hpp"

namespace cra::features {

enum class Schedule { barron, sup };

Schedule parse_schedule(const std::string& name);
std::string to_string(Schedule s);

/// k_b = b ceil((1+q)/4) if q mod 4 != 3, else b ((1+q)/4 + 1).
int smoothness_barron(int q, int b);
/// k^S_b = b ceil((q+3)/2).
int smoothness_sup(int q, int b);

struct SamplerConfig {
  int q = 1;          // effective dimension
  int a = 0;          // corrective depth; levels b = 0..a
  int l = 3;          // tail exponent of mu_l
  double r = 1.0;     // domain radius
  Schedule schedule = Schedule::sup;
  bool tabulate = false;  // evaluate SReLU through lookup tables

  /// l = max(q + 3, 3a + 3).
  static SamplerConfig with_default_tail(int q, int a, double r, Schedule schedule = Schedule::sup);

  int smoothness(int b) const;
  void validate() const;
};

/// Subspace basis: q orthonormal d-vectors.
using Basis = std::vector<Vec>;

Basis standard_basis(std::size_t d);

/// Draws from mu_l by rejection from a standard Cauchy proposal, accepting
/// with probability (1 + t^2) / (2 (1 + t^{2l})). Requires l >= 2.
std::vector<double> sample_mu_l(int l, std::uint64_t seed, std::size_t count);

/// Unnormalized density 1 / (1 + t^{2l}).
double mu_l_unnormalized(int l, double t);

/// Uniform unit vectors in span(basis). Throws std::invalid_argument when the
/// basis Gram matrix deviates from the identity by 1e-10 or more.
std::vector<Vec> sample_sphere_subspace(const Basis& basis, std::uint64_t seed, std::size_t count);

struct Unit {
  Vec omega;
  double threshold = 0.0;
  std::size_t subspace = 0;  // i
  int level = 0;             // b
};

class FeatureBank {
 public:
  FeatureBank() = default;
  FeatureBank(std::vector<Unit> units, std::vector<kernels::Activation> level_activations, double radius,
              std::size_t dim, std::size_t subspaces);

  std::size_t size() const { return units_.size(); }
  std::size_t dim() const { return dim_; }
  double radius() const { return radius_; }
  int levels() const { return static_cast<int>(activations_.size()); }
  std::size_t subspaces() const { return subspaces_; }

  const std::vector<Unit>& units() const { return units_; }
  const kernels::Activation& activation(int level) const { return activations_.at(level); }

  /// Indices of units on smoothness level b, in bank order.
  std::vector<std::size_t> level_indices(int level) const;

  /// Unit response act(<omega, x> / r - T).
  double response(std::size_t unit, std::span<const double> x) const;

 private:
  std::vector<Unit> units_;
  std::vector<kernels::Activation> activations_;
  double radius_ = 1.0;
  std::size_t dim_ = 0;
  std::size_t subspaces_ = 0;
};

/// Unit index of (i, b, j) is i N/m + b N/(m(a+1)) + j. Requires N divisible
/// by m (a + 1).
FeatureBank build_bank(const SamplerConfig& cfg, const std::vector<Basis>& bases, std::size_t n_units,
                       std::uint64_t seed);

Vec featurize(const FeatureBank& bank, std::span<const double> x);

/// Rows are featurize(points[i]).
Matrix feature_matrix(const FeatureBank& bank, const std::vector<Vec>& points);

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GdOptions {
  std::size_t steps = 1000;
  std::optional<double> step_size;    // nullopt: 1 / (1.01 lambda_max(Phi^T Phi / n))
  std::optional<double> ball_radius;  // project onto ||v|| <= R_c after each step
  bool record_history = false;
  double target_loss = 0.0;           // stop early once the loss is at or below this
  std::optional<Vec> initial;         // starting coefficients; zero when unset
};

struct LinearModel {
  Vec coeffs;
  double train_loss = 0.0;
  std::size_t steps = 0;
  double step_size = 0.0;
  bool converged = false;  // stopped because a step no longer lowered the loss
  std::size_t step_halvings = 0;  // auto-step retries after a divergence
  Vec loss_history;       // loss before the first step, then after each step
  Vec group_residuals;    // corrective fits: training MSE after each group
  Vec norm_history;       // ||v|| after each step, when recorded
};

/// Gradient descent from v = 0 (or options.initial) on (1/n) ||features v - targets||^2.
/// Runs until `steps`, `target_loss`, or a step that fails to lower the loss
/// by more than rounding (that step is undone). Throws DivergenceError after
/// 10 consecutive loss increases with an explicit step; an auto step is
/// halved and the fit restarted up to three times first.
LinearModel gd_fit(const Matrix& features, std::span<const double> targets, const GdOptions& options);

/// Fits level a to the targets, then each lower level to the running
/// residual. Coefficients are returned in bank order.
LinearModel corrective_fit(const FeatureBank& bank, const Matrix& features, std::span<const double> targets,
                           const GdOptions& per_group);
LinearModel corrective_fit(const FeatureBank& bank, const std::vector<Vec>& points,
                           std::span<const double> targets, const GdOptions& per_group);

Vec predict(const LinearModel& model, const Matrix& features);
double predict(const LinearModel& model, const FeatureBank& bank, std::span<const double> x);

struct TargetSpec {
  enum class Kind { cosine, gaussian, polynomial, custom };
  Kind kind = Kind::custom;
  std::string name;
  std::function<double(std::span<const double>)> eval;
  /// |G(omega)| / (2 pi)^q as a function of ||omega|| for radial spectra.
  std::function<double(double)> radial_spectrum;
  std::string fourier_note;

  double operator()(std::span<const double> x) const { return eval(x); }

  /// cos(<freq, x> + phase); spectrum is two atoms at +-freq.
  static TargetSpec cosine(Vec freq, double phase);
  /// exp(-||x - center||^2 / (2 width^2)).
  static TargetSpec gaussian(Vec center, double width);
  static TargetSpec custom(std::string name, std::function<double(std::span<const double>)> eval);
};

/// S^{(l)} = sup_omega ||omega||^l (1 + ||omega||^{q+1}) |G(omega)| / (2 pi)^q for
/// a radial spectrum, maximized on a grid of radii in [0, max_radius].
double sup_fourier_norm(const std::function<double(double)>& radial_spectrum, int q, int l,
                        double max_radius = 200.0, std::size_t grid = 400001);

/// Monte-Carlo estimate of integral (f - f_hat)^2 d zeta from draws of zeta.
double mse_on_measure(const LinearModel& model, const FeatureBank& bank, const TargetSpec& target,
                      const std::vector<Vec>& samples);
double mse_on_measure(const LinearModel& model, const Matrix& features, std::span<const double> targets);

/// n points uniform in the d-dimensional ball of radius r.
std::vector<Vec> sample_ball(std::size_t n, std::size_t d, double r, std::uint64_t seed);
/// n points uniform in [0, 1]^d.
std::vector<Vec> sample_cube(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace cra::features
