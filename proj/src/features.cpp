#include "cra/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

#include "cra/parallel.hpp"
#include "cra/rng.hpp"

namespace cra::features {

namespace {

constexpr int kPowerIterations = 30;
constexpr double kStepSafety = 1.01;
constexpr int kMaxIncreases = 10;
constexpr int kMaxStepHalvings = 3;
constexpr double kOrthonormalTol = 1e-10;
// A step that fails to lower the loss by more than rounding means GD has
// reached its floating-point floor. Rounding in the residual is relative to
// the loss itself, plus an absolute part relative to the target energy that
// dominates near exact interpolation.
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Floor {
  double abs;
  bool reached(double loss, double prev) const { return loss >= prev && loss - prev <= 8.0 * kEps * prev + abs; }
};

Floor loss_floor(std::span<const double> y) {
  const double scale = 1024.0 * kEps;
  return Floor{scale * scale * squared_norm(y) / static_cast<double>(y.size())};
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

Schedule parse_schedule(const std::string& name) {
  if (name == "barron") return Schedule::barron;
  if (name == "sup") return Schedule::sup;
  throw std::invalid_argument("unknown schedule '" + name + "' (expected barron or sup)");
}

std::string to_string(Schedule s) { return s == Schedule::barron ? "barron" : "sup"; }

int smoothness_barron(int q, int b) {
  if (q % 4 != 3) return b * ceil_div(1 + q, 4);
  return b * ((1 + q) / 4 + 1);
}

int smoothness_sup(int q, int b) { return b * ceil_div(q + 3, 2); }

SamplerConfig SamplerConfig::with_default_tail(int q, int a, double r, Schedule schedule) {
  SamplerConfig cfg;
  cfg.q = q;
  cfg.a = a;
  cfg.r = r;
  cfg.schedule = schedule;
  cfg.l = std::max(q + 3, 3 * a + 3);
  return cfg;
}

int SamplerConfig::smoothness(int b) const {
  return schedule == Schedule::sup ? smoothness_sup(q, b) : smoothness_barron(q, b);
}

void SamplerConfig::validate() const {
  if (q < 1) throw std::invalid_argument("sampler: q must be >= 1");
  if (a < 0) throw std::invalid_argument("sampler: a must be >= 0");
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("sampler: r must be positive");
  if (l < 2) throw std::invalid_argument("sampler: l must be >= 2");
  if (schedule == Schedule::sup && l < std::max(q + 3, 3 * a + 3))
    throw std::invalid_argument("sampler: sup schedule needs l >= max(q+3, 3a+3), got l=" +
                                std::to_string(l));
  if (smoothness(a) > kernels::kMaxOrder)
    throw std::invalid_argument("sampler: smoothness order " + std::to_string(smoothness(a)) +
                                " at level a exceeds the supported maximum " +
                                std::to_string(kernels::kMaxOrder));
}

Basis standard_basis(std::size_t d) {
  Basis b(d, Vec(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) b[i][i] = 1.0;
  return b;
}

double mu_l_unnormalized(int l, double t) { return 1.0 / (1.0 + std::pow(t * t, l)); }

std::vector<double> sample_mu_l(int l, std::uint64_t seed, std::size_t count) {
  if (l < 2) throw std::invalid_argument("sample_mu_l: l must be >= 2");
  Engine eng = make_engine(seed);
  std::cauchy_distribution<double> proposal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out;
  out.reserve(count);
  while (out.size() < count) {
    const double t = proposal(eng);
    const double t2 = t * t;
    const double accept = (1.0 + t2) / (2.0 * (1.0 + std::pow(t2, l)));
    if (unif(eng) < accept) out.push_back(t);
  }
  return out;
}

std::vector<Vec> sample_sphere_subspace(const Basis& basis, std::uint64_t seed, std::size_t count) {
  if (basis.empty()) throw std::invalid_argument("sphere sampler: empty basis");
  const std::size_t d = basis.front().size();
  for (const Vec& b : basis)
    if (b.size() != d) throw std::invalid_argument("sphere sampler: basis vectors differ in length");
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = dot(basis[i], basis[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) >= kOrthonormalTol)
        throw std::invalid_argument("sphere sampler: basis is not orthonormal");
    }
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  Vec g(basis.size());
  while (out.size() < count) {
    for (double& gi : g) gi = normal(eng);
    const double gn = norm(g);
    if (gn == 0.0) continue;
    Vec w(d, 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (std::size_t c = 0; c < d; ++c) w[c] += g[j] * basis[j][c];
    const double wn = norm(w);
    for (double& wc : w) wc /= wn;
    out.push_back(std::move(w));
  }
  return out;
}

FeatureBank::FeatureBank(std::vector<Unit> units, std::vector<kernels::Activation> level_activations,
                         double radius, std::size_t dim, std::size_t subspaces)
    : units_(std::move(units)),
      activations_(std::move(level_activations)),
      radius_(radius),
      dim_(dim),
      subspaces_(subspaces) {}

std::vector<std::size_t> FeatureBank::level_indices(int level) const {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < units_.size(); ++j)
    if (units_[j].level == level) idx.push_back(j);
  return idx;
}

double FeatureBank::response(std::size_t unit, std::span<const double> x) const {
  const Unit& u = units_[unit];
  return activations_[u.level](dot(u.omega, x) / radius_ - u.threshold);
}

FeatureBank build_bank(const SamplerConfig& cfg, const std::vector<Basis>& bases, std::size_t n_units,
                       std::uint64_t seed) {
  cfg.validate();
  if (bases.empty()) throw std::invalid_argument("build_bank: no subspaces");
  const std::size_t m = bases.size();
  const std::size_t levels = static_cast<std::size_t>(cfg.a) + 1;
  if (n_units == 0 || n_units % (m * levels) != 0)
    throw std::invalid_argument("build_bank: N=" + std::to_string(n_units) + " is not divisible by m(a+1)=" +
                                std::to_string(m * levels));
  const std::size_t d = bases.front().empty() ? 0 : bases.front().front().size();
  for (const Basis& b : bases) {
    if (b.size() != static_cast<std::size_t>(cfg.q))
      throw std::invalid_argument("build_bank: every subspace basis needs q vectors");
    for (const Vec& v : b)
      if (v.size() != d) throw std::invalid_argument("build_bank: basis vectors differ in length");
  }

  std::vector<kernels::Activation> acts;
  for (int b = 0; b <= cfg.a; ++b) {
    kernels::Activation act = kernels::Activation::smooth_relu(cfg.smoothness(b));
    if (cfg.tabulate && !act.is_relu()) act = act.with_table();
    acts.push_back(std::move(act));
  }

  const std::size_t per_group = n_units / (m * levels);
  std::vector<Unit> units;
  units.reserve(n_units);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t b = 0; b < levels; ++b) {
      const std::uint64_t g = i * levels + b;
      std::vector<Vec> omegas = sample_sphere_subspace(bases[i], substream_seed(seed, 2 * g), per_group);
      const std::vector<double> ts = sample_mu_l(cfg.l, substream_seed(seed, 2 * g + 1), per_group);
      for (std::size_t j = 0; j < per_group; ++j)
        units.push_back(Unit{std::move(omegas[j]), ts[j], i, static_cast<int>(b)});
    }
  }
  return FeatureBank(std::move(units), std::move(acts), cfg.r, d, m);
}

Vec featurize(const FeatureBank& bank, std::span<const double> x) {
  if (x.size() != bank.dim()) throw std::invalid_argument("featurize: input dimension mismatch");
  Vec out(bank.size());
  for (std::size_t j = 0; j < bank.size(); ++j) out[j] = bank.response(j, x);
  return out;
}

Matrix feature_matrix(const FeatureBank& bank, const std::vector<Vec>& points) {
  for (const Vec& p : points)
    if (p.size() != bank.dim()) throw std::invalid_argument("feature_matrix: input dimension mismatch");
  Matrix phi(points.size(), bank.size());
  parallel_for(points.size(), [&](std::size_t i) {
    auto row = phi.row(i);
    for (std::size_t j = 0; j < bank.size(); ++j) row[j] = bank.response(j, points[i]);
  });
  return phi;
}

namespace {

// Tracks the loss sequence and raises after too many consecutive increases.
class LossMonitor {
 public:
  explicit LossMonitor(double initial) : prev_(initial) {}
  void observe(double loss, std::size_t step) {
    if (!std::isfinite(loss))
      throw DivergenceError("gradient descent: non-finite loss at step " + std::to_string(step));
    increases_ = loss > prev_ ? increases_ + 1 : 0;
    if (increases_ >= kMaxIncreases)
      throw DivergenceError("gradient descent: loss increased " + std::to_string(kMaxIncreases) +
                            " consecutive times (step " + std::to_string(step) + ", loss " +
                            std::to_string(loss) + ")");
    prev_ = loss;
  }

 private:
  double prev_;
  int increases_ = 0;
};

// Auto step 1 / (1.01 lambda_max(Phi^T Phi / n)). The Hessian of the loss is
// twice that matrix, so every eigen-mode contracts by |1 - eta lambda_i| < 1
// and the loss never increases, projection included. step_scale < 1 is used
// after a divergence caused by an underestimated lambda_max.
double checked_step(const GdOptions& options, double gram_lambda_max, double step_scale) {
  if (options.step_size) {
    if (!(*options.step_size > 0.0)) throw std::invalid_argument("gd_fit: step size must be positive");
    return *options.step_size;
  }
  return step_scale * (gram_lambda_max > 0.0 ? 1.0 / (kStepSafety * gram_lambda_max) : 1.0);
}

// Iterates on v directly: v <- v - eta (2/n) Phi^T (Phi v - y).
LinearModel gd_primal(const Matrix& phi, std::span<const double> y, const GdOptions& options, double step_scale) {
  const std::size_t n = phi.rows();
  const double scale = 2.0 / static_cast<double>(n);
  const Matrix phit = phi.transposed();
  LinearModel model;
  model.step_size =
      checked_step(options, power_iteration_max_eig(phi, phit, kPowerIterations) / static_cast<double>(n), step_scale);
  const double eta = model.step_size;

  Vec v = options.initial ? *options.initial : Vec(phi.cols(), 0.0);
  Vec r = multiply(phi, v);
  for (std::size_t i = 0; i < n; ++i) r[i] -= y[i];
  double loss = squared_norm(r) / static_cast<double>(n);
  if (options.record_history) model.loss_history.push_back(loss);
  LossMonitor monitor(loss);
  const Floor floor = loss_floor(y);

  Vec v_prev(v.size()), r_prev(n), g(v.size());
  std::size_t step = 0;
  while (step < options.steps && loss > options.target_loss) {
    v_prev = v;
    r_prev = r;
    multiply_into(phit, r, g);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= eta * scale * g[j];
    if (options.ball_radius) {
      const double vn = norm(v);
      if (vn > *options.ball_radius)
        for (double& vj : v) vj *= *options.ball_radius / vn;
    }
    multiply_into(phi, v, r);
    for (std::size_t i = 0; i < n; ++i) r[i] -= y[i];
    const double next = squared_norm(r) / static_cast<double>(n);
    if (floor.reached(next, loss)) {
      std::swap(v, v_prev);
      std::swap(r, r_prev);
      model.converged = true;
      break;
    }
    loss = next;
    ++step;
    monitor.observe(loss, step);
    if (options.record_history) {
      model.loss_history.push_back(loss);
      model.norm_history.push_back(norm(v));
    }
  }
  model.coeffs = std::move(v);
  model.train_loss = loss;
  model.steps = step;
  return model;
}

// Tall problems: with H = Phi^T Phi and b = Phi^T y precomputed, a step costs
// one N x N product instead of two n x N ones. The loss comes from the
// quadratic form (v^T H v - 2 b^T v + y^T y) / n, whose rounding is relative
// to the size of the individual terms; the final loss is recomputed from the
// residual.
LinearModel gd_primal_gram(const Matrix& phi, std::span<const double> y, const GdOptions& options,
                           double step_scale) {
  const std::size_t n = phi.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Matrix phit = phi.transposed();
  const SymmetricMatrix h(gram_rows(phit));
  const Vec b = multiply(phit, y);
  const double yy = squared_norm(y);
  LinearModel model;
  model.step_size = checked_step(options, power_iteration_max_eig(h, kPowerIterations) * inv_n, step_scale);
  const double eta = model.step_size;

  Vec v = options.initial ? *options.initial : Vec(phi.cols(), 0.0);
  Vec u(v.size());
  h.multiply_into(v, u);
  struct Quad {
    double loss, noise;
  };
  auto quad = [&](const Vec& vv, const Vec& uu) {
    const double vhv = dot(vv, uu);
    const double bv = dot(b, vv);
    return Quad{(vhv - 2.0 * bv + yy) * inv_n, 16.0 * kEps * (std::abs(vhv) + 2.0 * std::abs(bv) + yy) * inv_n};
  };
  double loss = quad(v, u).loss;
  if (options.record_history) model.loss_history.push_back(loss);
  LossMonitor monitor(loss);

  Vec v_prev(v.size()), u_prev(v.size());
  std::size_t step = 0;
  while (step < options.steps && loss > options.target_loss) {
    v_prev = v;
    u_prev = u;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= eta * 2.0 * inv_n * (u[j] - b[j]);
    if (options.ball_radius) {
      const double vn = norm(v);
      if (vn > *options.ball_radius)
        for (double& vj : v) vj *= *options.ball_radius / vn;
    }
    h.multiply_into(v, u);
    const Quad next = quad(v, u);
    if (Floor{next.noise}.reached(next.loss, loss)) {
      std::swap(v, v_prev);
      std::swap(u, u_prev);
      model.converged = true;
      break;
    }
    loss = next.loss;
    ++step;
    monitor.observe(loss, step);
    if (options.record_history) {
      model.loss_history.push_back(loss);
      model.norm_history.push_back(norm(v));
    }
  }
  Vec r = multiply(phi, v);
  for (std::size_t i = 0; i < n; ++i) r[i] -= y[i];
  model.train_loss = squared_norm(r) / static_cast<double>(n);
  model.coeffs = std::move(v);
  model.steps = step;
  return model;
}

// With v = beta v0 + Phi^T c the update becomes c <- c - eta (2/n) r, where
// r = beta Phi v0 + G c - y and G = Phi Phi^T. Both recursions produce the same
// iterates. ||v||^2 = beta^2 ||v0||^2 + 2 beta <Phi v0, c> + c^T G c, and a
// projection rescales beta and c together, so it stays exact.
LinearModel gd_dual(const Matrix& phi, std::span<const double> y, const GdOptions& options, double step_scale) {
  const std::size_t n = phi.rows();
  const double scale = 2.0 / static_cast<double>(n);
  const SymmetricMatrix g(gram_rows(phi));
  LinearModel model;
  model.step_size =
      checked_step(options, power_iteration_max_eig(g, kPowerIterations) / static_cast<double>(n), step_scale);
  const double eta = model.step_size;

  const Vec v0 = options.initial ? *options.initial : Vec(phi.cols(), 0.0);
  const Vec u0 = multiply(phi, v0);
  const double v0_sq = squared_norm(v0);
  double beta = 1.0;
  Vec c(n, 0.0);
  Vec gc(n, 0.0);
  Vec r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = u0[i] - y[i];
  double loss = squared_norm(r) / static_cast<double>(n);
  if (options.record_history) model.loss_history.push_back(loss);
  LossMonitor monitor(loss);
  const Floor floor = loss_floor(y);

  const bool track_norm = options.ball_radius || options.record_history;
  Vec c_prev(n), r_prev(n);
  std::size_t step = 0;
  while (step < options.steps && loss > options.target_loss) {
    c_prev = c;
    r_prev = r;
    const double beta_prev = beta;
    for (std::size_t i = 0; i < n; ++i) c[i] -= eta * scale * r[i];
    g.multiply_into(c, gc);
    double vn = 0.0;
    if (track_norm) vn = std::sqrt(std::max(0.0, beta * beta * v0_sq + 2.0 * beta * dot(u0, c) + dot(c, gc)));
    if (options.ball_radius && vn > *options.ball_radius) {
      const double shrink = *options.ball_radius / vn;
      beta *= shrink;
      for (std::size_t i = 0; i < n; ++i) {
        c[i] *= shrink;
        gc[i] *= shrink;
      }
      vn = *options.ball_radius;
    }
    for (std::size_t i = 0; i < n; ++i) r[i] = beta * u0[i] + gc[i] - y[i];
    const double next = squared_norm(r) / static_cast<double>(n);
    if (floor.reached(next, loss)) {
      std::swap(c, c_prev);
      std::swap(r, r_prev);
      beta = beta_prev;
      model.converged = true;
      break;
    }
    loss = next;
    ++step;
    monitor.observe(loss, step);
    if (options.record_history) {
      model.loss_history.push_back(loss);
      model.norm_history.push_back(vn);
    }
  }
  model.coeffs = multiply(phi.transposed(), c);
  for (std::size_t j = 0; j < model.coeffs.size(); ++j) model.coeffs[j] += beta * v0[j];
  model.train_loss = loss;
  model.steps = step;
  return model;
}

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& cols) {
  Matrix out(m.rows(), cols.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(i, cols[j]);
  return out;
}

}  // namespace

LinearModel gd_fit(const Matrix& features, std::span<const double> targets, const GdOptions& options) {
  if (features.rows() != targets.size()) throw std::invalid_argument("gd_fit: row count != target count");
  if (features.rows() == 0) throw std::invalid_argument("gd_fit: no data");
  if (options.ball_radius && !(*options.ball_radius > 0.0))
    throw std::invalid_argument("gd_fit: ball radius must be positive");
  if (options.initial && options.initial->size() != features.cols())
    throw std::invalid_argument("gd_fit: initial coefficients have the wrong length");
  // An auto step rests on a power-iteration estimate; if that undershoots
  // lambda_max badly enough to diverge, retry with smaller steps.
  double step_scale = 1.0;
  for (int attempt = 0;; ++attempt) {
    try {
      LinearModel m;
      if (features.cols() > features.rows())
        m = gd_dual(features, targets, options, step_scale);
      else if (features.rows() > features.cols() && 4 * options.steps > features.cols())
        m = gd_primal_gram(features, targets, options, step_scale);
      else
        m = gd_primal(features, targets, options, step_scale);
      m.step_halvings = static_cast<std::size_t>(attempt);
      return m;
    } catch (const DivergenceError&) {
      if (options.step_size || attempt >= kMaxStepHalvings) throw;
      step_scale *= 0.5;
    }
  }
}

LinearModel corrective_fit(const FeatureBank& bank, const Matrix& features, std::span<const double> targets,
                           const GdOptions& per_group) {
  if (features.cols() != bank.size()) throw std::invalid_argument("corrective_fit: feature count mismatch");
  if (features.rows() != targets.size()) throw std::invalid_argument("corrective_fit: row count mismatch");
  const std::size_t n = targets.size();
  Vec residual(targets.begin(), targets.end());
  LinearModel model;
  model.coeffs.assign(bank.size(), 0.0);
  for (int b = bank.levels() - 1; b >= 0; --b) {
    const std::vector<std::size_t> idx = bank.level_indices(b);
    const Matrix sub = select_columns(features, idx);
    const LinearModel part = gd_fit(sub, residual, per_group);
    const Vec fitted = multiply(sub, part.coeffs);
    for (std::size_t i = 0; i < n; ++i) residual[i] -= fitted[i];
    for (std::size_t j = 0; j < idx.size(); ++j) model.coeffs[idx[j]] = part.coeffs[j];
    model.steps += part.steps;
    model.step_size = part.step_size;
    model.loss_history.insert(model.loss_history.end(), part.loss_history.begin(), part.loss_history.end());
    model.norm_history.insert(model.norm_history.end(), part.norm_history.begin(), part.norm_history.end());
    model.group_residuals.push_back(squared_norm(residual) / static_cast<double>(n));
  }
  model.train_loss = model.group_residuals.back();
  return model;
}

LinearModel corrective_fit(const FeatureBank& bank, const std::vector<Vec>& points,
                           std::span<const double> targets, const GdOptions& per_group) {
  return corrective_fit(bank, feature_matrix(bank, points), targets, per_group);
}

Vec predict(const LinearModel& model, const Matrix& features) { return multiply(features, model.coeffs); }

double predict(const LinearModel& model, const FeatureBank& bank, std::span<const double> x) {
  return dot(model.coeffs, featurize(bank, x));
}

TargetSpec TargetSpec::cosine(Vec freq, double phase) {
  TargetSpec t;
  t.kind = Kind::cosine;
  t.name = "cosine";
  t.eval = [freq, phase](std::span<const double> x) { return std::cos(dot(freq, x) + phase); };
  t.fourier_note = "G = pi (e^{i phase} delta_{freq} + e^{-i phase} delta_{-freq}); Fourier norm 1";
  return t;
}

TargetSpec TargetSpec::gaussian(Vec center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian target: width must be positive");
  TargetSpec t;
  t.kind = Kind::gaussian;
  t.name = "gaussian";
  const double q = static_cast<double>(center.size());
  t.eval = [center, width](std::span<const double> x) {
    if (x.size() != center.size()) throw std::invalid_argument("gaussian target: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return std::exp(-s / (2.0 * width * width));
  };
  t.radial_spectrum = [q, width](double rho) {
    return std::pow(2.0 * std::numbers::pi, -q / 2.0) * std::pow(width, q) *
           std::exp(-width * width * rho * rho / 2.0);
  };
  t.fourier_note = "|G(w)| / (2 pi)^q = (2 pi)^{-q/2} width^q exp(-width^2 |w|^2 / 2)";
  return t;
}

TargetSpec TargetSpec::custom(std::string name, std::function<double(std::span<const double>)> eval) {
  TargetSpec t;
  t.kind = Kind::custom;
  t.name = std::move(name);
  t.eval = std::move(eval);
  return t;
}

double sup_fourier_norm(const std::function<double(double)>& radial_spectrum, int q, int l, double max_radius,
                        std::size_t grid) {
  if (grid < 2) throw std::invalid_argument("sup_fourier_norm: grid too small");
  double best = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double rho = max_radius * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double v = std::pow(rho, l) * (1.0 + std::pow(rho, q + 1)) * radial_spectrum(rho);
    best = std::max(best, v);
  }
  return best;
}

double mse_on_measure(const LinearModel& model, const FeatureBank& bank, const TargetSpec& target,
                      const std::vector<Vec>& samples) {
  if (samples.empty()) throw std::invalid_argument("mse_on_measure: no samples");
  Vec sq(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const double e = target(samples[i]) - predict(model, bank, samples[i]);
    sq[i] = e * e;
  });
  return pairwise_sum(sq) / static_cast<double>(samples.size());
}

double mse_on_measure(const LinearModel& model, const Matrix& features, std::span<const double> targets) {
  const Vec pred = predict(model, features);
  Vec sq(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) sq[i] = (pred[i] - targets[i]) * (pred[i] - targets[i]);
  return pairwise_sum(sq) / static_cast<double>(pred.size());
}

std::vector<Vec> sample_ball(std::size_t n, std::size_t d, double r, std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("sample_ball: d must be positive");
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(n);
  while (out.size() < n) {
    Vec x(d);
    for (double& xi : x) xi = normal(eng);
    const double xn = norm(x);
    if (xn == 0.0) continue;
    const double rad = r * std::pow(unif(eng), 1.0 / static_cast<double>(d));
    for (double& xi : x) xi *= rad / xn;
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vec> sample_cube(std::size_t n, std::size_t d, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> out(n, Vec(d));
  for (Vec& x : out)
    for (double& xi : x) xi = unif(eng);
  return out;
}

}  // namespace cra::features
