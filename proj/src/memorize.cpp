#include "cra/memorize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cra/features.hpp"
#include "cra/parallel.hpp"
#include "cra/reps.hpp"
#include "cra/rng.hpp"

namespace cra::memorize {

namespace {

double relu(double t) { return t > 0.0 ? t : 0.0; }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void check_residual(const LabeledSet& set, std::span<const double> residual) {
  if (residual.size() != set.size()) throw std::invalid_argument("residual length differs from the point count");
  for (double r : residual)
    if (!std::isfinite(r)) throw std::invalid_argument("residual is not finite");
}

}  // namespace

void LabeledSet::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("labeled set: theta must be positive");
  if (labels.size() != points.size()) throw std::invalid_argument("labeled set: label count differs from point count");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) throw std::invalid_argument("labeled set: point dimension differs from d");
    if (norm(points[i]) > 1.0) throw std::invalid_argument("labeled set: point outside the unit ball");
    if (!(labels[i] >= 0.0 && labels[i] <= 1.0)) throw std::invalid_argument("labeled set: label outside [0, 1]");
    for (std::size_t j = 0; j < i; ++j)
      if (distance(points[i], points[j]) < theta)
        throw std::invalid_argument("labeled set: points " + std::to_string(j) + " and " + std::to_string(i) +
                                    " are closer than theta");
  }
}

LabeledSet gen_separated_set(std::size_t n, std::size_t d, double theta, std::uint64_t seed, std::size_t budget) {
  if (d == 0) throw std::invalid_argument("gen_separated_set: d must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("gen_separated_set: theta must be positive");
  Engine eng = make_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  LabeledSet set;
  set.theta = theta;
  set.d = d;
  std::size_t draws = 0;
  while (set.points.size() < n) {
    if (draws++ >= budget)
      throw PackingError("gen_separated_set: could not place " + std::to_string(n) + " points with separation " +
                         std::to_string(theta) + " in dimension " + std::to_string(d) + " within " +
                         std::to_string(budget) + " draws (placed " + std::to_string(set.points.size()) + ")");
    Vec x(d);
    for (double& xi : x) xi = normal(eng);
    const double xn = norm(x);
    if (xn == 0.0) continue;
    const double rad = std::pow(unif(eng), 1.0 / static_cast<double>(d));
    for (double& xi : x) xi *= rad / xn;
    bool ok = true;
    for (const Vec& p : set.points)
      if (distance(p, x) < theta) {
        ok = false;
        break;
      }
    if (ok) set.points.push_back(std::move(x));
  }
  Engine label_eng = make_engine(seed, 1);
  for (std::size_t i = 0; i < n; ++i) set.labels.push_back(unif(label_eng));
  return set;
}

std::complex<double> dft_eval(const LabeledSet& set, std::span<const double> residual, std::span<const double> xi) {
  if (residual.size() != set.size()) throw std::invalid_argument("dft_eval: residual length differs from point count");
  if (xi.size() != set.d) throw std::invalid_argument("dft_eval: frequency dimension differs from d");
  Vec re(set.size());
  Vec im(set.size());
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double ph = dot(xi, set.points[j]);
    re[j] = residual[j] * std::cos(ph);
    im[j] = residual[j] * std::sin(ph);
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

double log_n(std::size_t n) { return std::log(static_cast<double>(std::max<std::size_t>(n, 2))); }

MemorizePlan MemorizePlan::make(std::size_t n, double theta, double eps, double delta, double c0, std::uint64_t seed,
                                std::size_t max_units_per_round) {
  if (n == 0) throw std::invalid_argument("memorize: empty set");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("memorize: eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("memorize: delta must lie in (0, 1)");
  if (!(c0 > 0.0)) throw std::invalid_argument("memorize: c0 must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("memorize: theta must be positive");
  if (max_units_per_round == 0) throw std::invalid_argument("memorize: max units per round must be positive");
  MemorizePlan plan;
  plan.theta = theta;
  plan.seed = seed;
  plan.s = c0 + c0 * std::log(std::max(1.0 / theta, 2.0));
  plan.log_n = memorize::log_n(n);
  plan.sigma = std::sqrt(2.0 * plan.s * plan.log_n) / theta;
  const double ln = std::log(static_cast<double>(n));
  plan.rounds = static_cast<std::size_t>(std::max(1.0, std::ceil(ln + std::log(1.0 / delta) + std::log(1.0 / eps))));
  const double L = c0 * std::pow(plan.s * plan.log_n / theta, 4);
  plan.formula_units = 2.0 * static_cast<double>(n) * std::numbers::e * L;
  const double capped = std::min(std::ceil(plan.formula_units), static_cast<double>(max_units_per_round));
  plan.units_per_round = static_cast<std::size_t>(std::max(1.0, capped));
  return plan;
}

double ReluNetwork::operator()(std::span<const double> x) const {
  Vec terms(units.size());
  for (std::size_t j = 0; j < units.size(); ++j)
    terms[j] = units[j].coeff * relu(scale * dot(units[j].omega, x) - units[j].threshold);
  return pairwise_sum(terms);
}

Vec ReluNetwork::eval_all(const std::vector<Vec>& points) const {
  Vec out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = (*this)(points[i]); });
  return out;
}

Matrix ReluNetwork::unit_matrix(const std::vector<Vec>& points) const {
  Matrix m(points.size(), units.size());
  parallel_for(points.size(), [&](std::size_t i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < units.size(); ++j)
      row[j] = relu(scale * dot(units[j].omega, points[i]) - units[j].threshold);
  });
  return m;
}

RoundResult correction_round(const LabeledSet& set, std::span<const double> residual, const MemorizePlan& plan,
                             std::size_t round_index) {
  check_residual(set, residual);
  const std::size_t n0 = plan.units_per_round;
  const double alpha = plan.alpha();

  // Draws are taken sequentially from the round's substream, so the unit list
  // does not depend on the thread count.
  Engine eng = make_engine(plan.seed, round_index);
  std::normal_distribution<double> normal(0.0, plan.sigma);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  RoundResult out;
  out.partial.scale = plan.scale();
  out.partial.units.resize(n0);
  for (ReluUnit& u : out.partial.units) {
    u.omega.resize(set.d);
    for (double& w : u.omega) w = normal(eng);
    u.threshold = unif(eng);
  }

  parallel_for(n0, [&](std::size_t l) {
    ReluUnit& u = out.partial.units[l];
    const std::complex<double> F = dft_eval(set, residual, u.omega);
    const double mag = std::abs(F);
    const double phi = mag > 0.0 ? -std::arg(F) : 0.0;
    u.coeff = mag * 4.0 * reps::h_second_deriv({alpha, phi}, u.threshold) / static_cast<double>(n0);
  });

  const Vec fitted = out.partial.eval_all(set.points);
  out.new_residual.resize(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) out.new_residual[k] = residual[k] - fitted[k];
  return out;
}

MemorizeResult memorize(const LabeledSet& set, double eps, double delta, double c0, std::uint64_t seed,
                        const MemorizeOptions& options) {
  set.validate();
  MemorizeResult res;
  res.plan = MemorizePlan::make(set.size(), set.theta, eps, delta, c0, seed, options.max_units_per_round);
  if (options.units_per_round) {
    if (*options.units_per_round == 0) throw std::invalid_argument("memorize: units per round must be positive");
    res.plan.units_per_round = std::min(*options.units_per_round, options.max_units_per_round);
  }
  res.stacked.scale = res.plan.scale();

  Vec residual = set.labels;
  res.history.push_back(squared_norm(residual));
  for (std::size_t i = 0; i < res.plan.rounds; ++i) {
    RoundResult round = correction_round(set, residual, res.plan, i);
    for (ReluUnit& u : round.partial.units) res.stacked.units.push_back(std::move(u));
    residual = std::move(round.new_residual);
    for (double r : residual)
      if (!std::isfinite(r)) throw std::runtime_error("memorize: residual overflowed in round " + std::to_string(i));
    res.history.push_back(squared_norm(residual));
  }

  const Vec fitted = res.stacked.eval_all(set.points);
  Vec err(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) err[k] = set.labels[k] - fitted[k];
  res.stacked_loss = squared_norm(err);
  res.net = res.stacked;

  if (options.refit) {
    // Joint least squares over the concatenated units, started from whichever
    // of the stacked coefficients and zero has the lower loss. GD never
    // increases the loss, so the refit is at least as good as both.
    const Matrix phi = res.stacked.unit_matrix(set.points);
    features::GdOptions gd;
    gd.steps = options.refit_steps;
    // Stop once the memorization goal sum_k err_k^2 <= eps is met.
    gd.target_loss = eps / static_cast<double>(set.size());
    if (res.stacked_loss < res.history.front()) {
      Vec init(res.stacked.units.size());
      for (std::size_t j = 0; j < init.size(); ++j) init[j] = res.stacked.units[j].coeff;
      gd.initial = std::move(init);
    }
    const features::LinearModel fit = features::gd_fit(phi, set.labels, gd);
    for (std::size_t j = 0; j < fit.coeffs.size(); ++j) res.net.units[j].coeff = fit.coeffs[j];
    res.refit_loss = fit.train_loss * static_cast<double>(set.size());
    res.refit_steps_taken = fit.steps;
  }
  return res;
}

}  // namespace cra::memorize
