#pragma once

// Corrective memorization of labels on theta-separated points in the unit ball.
//
// Each round estimates the current residual f through its discrete Fourier
// transform F(xi) = sum_j f(x_j) e^{i <xi, x_j>}. For xi ~ N(0, sigma^2 I) with
// sigma = sqrt(2 s log n) / theta the cross terms are O(n^{-s}), so
// Re F(xi) e^{-i <xi, x_k>} = |F| cos(<xi, x_k> + phi), phi = -arg F, is an
// almost unbiased estimate of f(x_k). The cosine is written as an average of
// ReLUs, giving N0 ReLU units per round. The next round fits what is left.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cra/linalg.hpp"

namespace cra::memorize {

struct LabeledSet {
  std::vector<Vec> points;
  Vec labels;
  double theta = 0.0;
  std::size_t d = 0;

  std::size_t size() const { return points.size(); }

  /// Throws std::invalid_argument unless every point lies in the unit ball,
  /// pairwise distances are at least theta and labels lie in [0, 1].
  void validate() const;
};

class PackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n points uniform in the unit ball, kept when at least theta away from
/// all earlier ones; labels Unif[0, 1]. Throws PackingError after `budget`
/// draws.
LabeledSet gen_separated_set(std::size_t n, std::size_t d, double theta, std::uint64_t seed,
                             std::size_t budget = 1000000);

std::complex<double> dft_eval(const LabeledSet& set, std::span<const double> residual, std::span<const double> xi);

/// log n with n clamped to 2, so sigma stays positive for a single point.
double log_n(std::size_t n);

struct MemorizePlan {
  double theta = 0.0;
  double s = 0.0;
  double log_n = 0.0;
  double sigma = 0.0;               // sqrt(2 s log n) / theta
  std::size_t units_per_round = 1;  // N0 actually used
  double formula_units = 0.0;       // 2 n e L with L = c0 s^4 log^4 n / theta^4
  std::size_t rounds = 1;
  std::uint64_t seed = 0;

  /// Frequency of the cosine in units of the rescaled argument: 2 s log n / theta.
  double alpha() const { return 2.0 * s * log_n / theta; }
  /// theta / (2 s log n).
  double scale() const { return theta / (2.0 * s * log_n); }

  /// s = c0 + c0 log(max(1/theta, 2)), rounds = ceil(log n + log 1/delta + log 1/eps).
  /// N0 is the formula value capped at max_units_per_round.
  static MemorizePlan make(std::size_t n, double theta, double eps, double delta, double c0, std::uint64_t seed,
                           std::size_t max_units_per_round);
};

struct ReluUnit {
  double coeff = 0.0;
  Vec omega;
  double threshold = 0.0;
};

/// x -> sum_j a_j ReLU(scale <omega_j, x> - T_j).
struct ReluNetwork {
  std::vector<ReluUnit> units;
  double scale = 1.0;

  double operator()(std::span<const double> x) const;
  Vec eval_all(const std::vector<Vec>& points) const;
  /// n x N matrix of ReLU(scale <omega_j, x_i> - T_j).
  Matrix unit_matrix(const std::vector<Vec>& points) const;
};

struct RoundResult {
  ReluNetwork partial;
  Vec new_residual;
};

/// One correction round with plan.units_per_round draws from the substream
/// (plan.seed, round_index).
RoundResult correction_round(const LabeledSet& set, std::span<const double> residual, const MemorizePlan& plan,
                             std::size_t round_index);

struct MemorizeOptions {
  std::size_t max_units_per_round = 16384;
  std::optional<std::size_t> units_per_round;  // replaces the formula N0 (still capped) when set
  bool refit = true;
  std::size_t refit_steps = 20000000;  // GD budget; stops early once the loss reaches eps
};

struct MemorizeResult {
  MemorizePlan plan;
  ReluNetwork stacked;   // concatenated rounds with their own coefficients
  ReluNetwork net;       // refit coefficients when refit is on, else stacked
  Vec history;           // history[0] = ||y||^2, then ||f^{rem,i}||^2 after round i
  double stacked_loss = 0.0;  // sum_k (y_k - stacked(x_k))^2
  std::optional<double> refit_loss;
  std::size_t refit_steps_taken = 0;

  double final_loss() const { return refit_loss ? *refit_loss : stacked_loss; }
};

/// Requires eps, delta in (0, 1) and c0 > 0.
MemorizeResult memorize(const LabeledSet& set, double eps, double delta, double c0, std::uint64_t seed,
                        const MemorizeOptions& options = {});

}  // namespace cra::memorize
