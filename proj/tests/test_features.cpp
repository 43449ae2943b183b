#include "cra/features.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace cra;
using namespace cra::features;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal(eng);
  return m;
}

Vec random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  Vec v(n);
  for (double& x : v) x = normal(eng);
  return v;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Eigen::VectorXd to_eigen(const Vec& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

double oracle_loss(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& v) {
  return (a * v - y).squaredNorm() / static_cast<double>(a.rows());
}

}  // namespace

TEST(Linalg, SymmetricProductMatchesDense) {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> nd;
  for (std::size_t n : {1u, 7u, 128u, 129u, 300u}) {
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = nd(eng);
    Vec v(n);
    for (double& x : v) x = nd(eng);
    const Vec dense = multiply(g, v);
    Vec sym(n);
    const SymmetricMatrix s(g);
    s.multiply_into(v, sym);
    for (std::size_t i = 0; i < n; ++i) {
      double scale = 0.0;
      for (std::size_t j = 0; j < n; ++j) scale += std::abs(g(i, j) * v[j]);
      EXPECT_NEAR(sym[i], dense[i], 1e-14 * scale) << n << " " << i;
    }
    Vec again(n);
    setenv("CRA_THREADS", "3", 1);
    s.multiply_into(v, again);
    unsetenv("CRA_THREADS");
    EXPECT_EQ(again, sym);
  }
  EXPECT_THROW(SymmetricMatrix(Matrix(2, 3)), std::invalid_argument);
}

TEST(Linalg, DenseProductMatchesDot) {
  std::mt19937_64 eng(6);
  std::normal_distribution<double> nd;
  for (std::size_t cols : {3u, 128u, 1000u}) {
    Matrix m(7, cols);
    for (std::size_t i = 0; i < 7; ++i)
      for (double& x : m.row(i)) x = nd(eng);
    Vec v(cols);
    for (double& x : v) x = nd(eng);
    const Vec out = multiply(m, v);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(out[i], dot(m.row(i), v));
  }
}

TEST(Schedules, SupAndBarron) {
  EXPECT_EQ(smoothness_sup(2, 0), 0);
  EXPECT_EQ(smoothness_sup(2, 1), 3);
  EXPECT_EQ(smoothness_sup(1, 2), 4);
  EXPECT_EQ(smoothness_barron(3, 1), 2);
  EXPECT_EQ(smoothness_barron(7, 1), 3);
  EXPECT_EQ(smoothness_barron(1, 1), 1);
  EXPECT_EQ(smoothness_barron(4, 2), 4);
  EXPECT_EQ(parse_schedule("sup"), Schedule::sup);
  EXPECT_THROW(parse_schedule("other"), std::invalid_argument);
}

TEST(SamplerConfig, TailExponentRule) {
  const SamplerConfig cfg = SamplerConfig::with_default_tail(2, 1, 1.0);
  EXPECT_EQ(cfg.l, 6);
  EXPECT_NO_THROW(cfg.validate());
  SamplerConfig bad = cfg;
  bad.l = 5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.schedule = Schedule::barron;
  EXPECT_NO_THROW(bad.validate());
  SamplerConfig deep = SamplerConfig::with_default_tail(2, 3, 1.0);
  EXPECT_THROW(deep.validate(), std::invalid_argument);  // k = 9 beyond supported order
}

TEST(MuL, KolmogorovSmirnovAgainstNumericCdf) {
  const int l = 3;
  std::vector<double> xs = sample_mu_l(l, 1, 100000);
  std::sort(xs.begin(), xs.end());
  // Cumulative Simpson on a fine grid; tails beyond |t| = 50 carry < 1e-9 mass.
  const double lo = -50.0, hi = 50.0, h = 1e-3;
  const std::size_t cells = static_cast<std::size_t>((hi - lo) / h);
  std::vector<double> cdf(cells + 1, 0.0);
  auto f = [l](double t) { return mu_l_unnormalized(l, t); };
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = lo + h * static_cast<double>(i);
    cdf[i + 1] = cdf[i] + cra::testing::simpson(f, a, a + h, 4);
  }
  const double z = cdf.back();
  auto cdf_at = [&](double t) {
    if (t <= lo) return 0.0;
    if (t >= hi) return 1.0;
    const double u = (t - lo) / h;
    const std::size_t i = std::min(cells - 1, static_cast<std::size_t>(u));
    const double frac = u - static_cast<double>(i);
    return (cdf[i] + frac * (cdf[i + 1] - cdf[i])) / z;
  };
  // Normalization of 1/(1+t^{2l}) is pi / (l sin(pi / 2l)).
  EXPECT_NEAR(z, std::numbers::pi / (l * std::sin(std::numbers::pi / (2 * l))), 1e-8);
  double ks = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = cdf_at(xs[i]);
    ks = std::max({ks, std::abs(c - static_cast<double>(i) / n), std::abs(c - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(MuL, SymmetricMean) {
  for (int l : {2, 3, 5}) {
    const std::vector<double> xs = sample_mu_l(l, 11 + l, 50000);
    const double mean = pairwise_sum(xs) / xs.size();
    Vec sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
    const double se = std::sqrt(pairwise_sum(sq) / (xs.size() - 1) / xs.size());
    EXPECT_LT(std::abs(mean), 3.0 * se) << "l=" << l;
  }
}

TEST(MuL, SecondMomentForL2) {
  // Quadrature moment: int t^2/(1+t^4) / int 1/(1+t^4), tail beyond L ~ 1/L.
  const double L = 2000.0;
  const double num = cra::testing::simpson([](double t) { return t * t / (1 + t * t * t * t); }, 0, L, 4000000) + 1.0 / L;
  const double den = cra::testing::simpson([](double t) { return 1.0 / (1 + t * t * t * t); }, 0, L, 4000000);
  const double moment = num / den;
  EXPECT_NEAR(moment, 1.0, 1e-6);  // both integrals equal pi / (2 sqrt 2)
  const std::vector<double> xs = sample_mu_l(2, 5, 200000);
  Vec sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = xs[i] * xs[i];
  const double emp = pairwise_sum(sq) / xs.size();
  EXPECT_TRUE(std::isfinite(emp));
  // T^2 has tail index 3/2 so the error decays like n^{-1/3}.
  EXPECT_NEAR(emp, moment, 0.1);
}

TEST(MuL, RejectsSmallL) { EXPECT_THROW(sample_mu_l(1, 1, 10), std::invalid_argument); }

TEST(Sphere, OneDimensionalSigns) {
  const Basis b = {{1.0, 0.0, 0.0}};
  const std::vector<Vec> ws = sample_sphere_subspace(b, 3, 10000);
  int plus = 0;
  for (const Vec& w : ws) {
    ASSERT_EQ(std::abs(w[0]), 1.0);
    ASSERT_EQ(w[1], 0.0);
    plus += w[0] > 0;
  }
  EXPECT_NEAR(plus / 10000.0, 0.5, 0.03);
}

TEST(Sphere, SubspaceStatistics) {
  // Orthonormal 3-frame in R^10 from a QR factorization.
  Eigen::MatrixXd raw = to_eigen(random_matrix(10, 3, 17));
  Eigen::MatrixXd qm = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() * Eigen::MatrixXd::Identity(10, 3);
  Basis basis(3, Vec(10));
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 10; ++c) basis[j][c] = qm(c, j);
  const std::size_t n = 10000;
  const std::vector<Vec> ws = sample_sphere_subspace(basis, 9, n);
  Vec mean(10, 0.0);
  for (const Vec& w : ws) {
    ASSERT_NEAR(norm(w), 1.0, 1e-12);
    const Eigen::VectorXd ew = to_eigen(w);
    ASSERT_LT((ew - qm * (qm.transpose() * ew)).norm(), 1e-12);
    for (int c = 0; c < 10; ++c) mean[c] += w[c] / n;
  }
  for (int c = 0; c < 10; ++c) {
    double var = 0.0;
    for (const Vec& w : ws) var += (w[c] - mean[c]) * (w[c] - mean[c]);
    const double se = std::sqrt(var / (n - 1) / n);
    EXPECT_LT(std::abs(mean[c]), 3.0 * se + 1e-15) << "component " << c;
  }
}

TEST(Sphere, FullSphereUnitNorm) {
  const std::vector<Vec> ws = sample_sphere_subspace(standard_basis(5), 2, 1000);
  for (const Vec& w : ws) EXPECT_NEAR(norm(w), 1.0, 1e-12);
}

TEST(Sphere, RejectsNonOrthonormal) {
  EXPECT_THROW(sample_sphere_subspace({{1.0, 0.0}, {1.0, 1e-3}}, 1, 1), std::invalid_argument);
  EXPECT_THROW(sample_sphere_subspace({{1.0 + 1e-9, 0.0}}, 1, 1), std::invalid_argument);
}

TEST(Bank, ReluOnlyAtDepthZero) {
  const FeatureBank bank = build_bank(SamplerConfig::with_default_tail(2, 0, 1.0), {standard_basis(2)}, 8, 1);
  ASSERT_EQ(bank.size(), 8u);
  EXPECT_TRUE(bank.activation(0).is_relu());
  for (const Unit& u : bank.units()) EXPECT_EQ(u.level, 0);
}

TEST(Bank, TwoLevelPartition) {
  const FeatureBank bank = build_bank(SamplerConfig::with_default_tail(2, 1, 1.0), {standard_basis(2)}, 8, 1);
  ASSERT_EQ(bank.size(), 8u);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(bank.units()[j].level, j < 4 ? 0 : 1);
  EXPECT_TRUE(bank.activation(0).is_relu());
  EXPECT_EQ(bank.activation(1).order(), 3);
  EXPECT_EQ(bank.level_indices(1).size(), 4u);
}

TEST(Bank, BarronScheduleOrder) {
  SamplerConfig cfg = SamplerConfig::with_default_tail(3, 1, 1.0, Schedule::barron);
  const FeatureBank bank = build_bank(cfg, {standard_basis(3)}, 4, 1);
  EXPECT_EQ(bank.activation(1).order(), 2);
}

TEST(Bank, DivisibilityError) {
  const SamplerConfig cfg = SamplerConfig::with_default_tail(2, 1, 1.0);
  EXPECT_THROW(build_bank(cfg, {standard_basis(2)}, 7, 1), std::invalid_argument);
  EXPECT_THROW(build_bank(cfg, {standard_basis(2), standard_basis(2)}, 6, 1), std::invalid_argument);
}

TEST(Bank, MultiSubspaceGroupsAndReproducibility) {
  const SamplerConfig cfg = SamplerConfig::with_default_tail(1, 1, 2.0);
  std::vector<Basis> bases;
  for (std::size_t i = 0; i < 3; ++i) {
    Vec e(4, 0.0);
    e[i] = 1.0;
    bases.push_back({e});
  }
  const FeatureBank a = build_bank(cfg, bases, 30, 42);
  const FeatureBank b = build_bank(cfg, bases, 30, 42);
  const FeatureBank c = build_bank(cfg, bases, 30, 43);
  ASSERT_EQ(a.size(), 30u);
  bool differs = false;
  for (std::size_t j = 0; j < 30; ++j) {
    const Unit& u = a.units()[j];
    EXPECT_EQ(u.subspace, j / 10);
    EXPECT_EQ(u.level, static_cast<int>((j % 10) / 5));
    EXPECT_NEAR(norm(u.omega), 1.0, 1e-12);
    for (std::size_t c2 = 0; c2 < 4; ++c2)
      if (c2 != u.subspace) EXPECT_EQ(u.omega[c2], 0.0);
    EXPECT_EQ(u.omega, b.units()[j].omega);
    EXPECT_EQ(u.threshold, b.units()[j].threshold);
    differs |= u.threshold != c.units()[j].threshold;
  }
  EXPECT_TRUE(differs);
}

TEST(Featurize, UnitResponses) {
  const kernels::Activation relu = kernels::Activation::relu();
  const kernels::Activation s2 = kernels::Activation::smooth_relu(2);
  std::vector<Unit> units = {{{1.0, 0.0}, 1.5, 0, 0}, {{0.0, 1.0}, -0.25, 0, 1}, {{1.0, 0.0}, 10.0, 0, 1}};
  const FeatureBank bank(units, {relu, s2}, 2.0, 2, 1);
  const Vec x = {1.0, 1.5};
  const Vec f = featurize(bank, x);
  EXPECT_EQ(f[0], 0.0);                  // 0.5 - 1.5 = -1
  EXPECT_DOUBLE_EQ(f[1], 0.75 + 0.25);   // argument 1 >= w0
  EXPECT_EQ(f[2], 0.0);
  const Vec f0 = featurize(bank, Vec{0.0, 0.0});
  EXPECT_EQ(f0[2], 0.0);
  EXPECT_THROW(featurize(bank, Vec{1.0}), std::invalid_argument);
}

TEST(Featurize, MatrixMatchesRows) {
  const FeatureBank bank = build_bank(SamplerConfig::with_default_tail(2, 1, 1.0), {standard_basis(2)}, 16, 5);
  const std::vector<Vec> pts = sample_ball(20, 2, 1.0, 3);
  const Matrix phi = feature_matrix(bank, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec row = featurize(bank, pts[i]);
    for (std::size_t j = 0; j < bank.size(); ++j) EXPECT_EQ(phi(i, j), row[j]);
  }
}

TEST(GdFit, IdentityRecoversTargets) {
  const std::size_t n = 6;
  Matrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  const Vec y = {0.1, -2.0, 3.0, 0.5, 0.0, 1.0};
  GdOptions opt;
  opt.steps = 5000;  // the auto step puts the single mode at factor -0.98 per step
  const LinearModel m = gd_fit(id, y, opt);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(m.coeffs[i], y[i], 1e-12);
  EXPECT_LT(m.train_loss, 1e-24);
}

TEST(GdFit, ZeroTargetsStayZero) {
  const Matrix a = random_matrix(20, 10, 1);
  const LinearModel m = gd_fit(a, Vec(20, 0.0), GdOptions{});
  for (double v : m.coeffs) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m.train_loss, 0.0);
}

TEST(GdFit, MatchesNormalEquations) {
  const Matrix a = random_matrix(100, 50, 7);
  const Vec y = random_vec(100, 8);
  GdOptions opt;
  opt.steps = 10000;
  opt.record_history = true;
  const LinearModel m = gd_fit(a, y, opt);
  for (std::size_t s = 1; s < m.loss_history.size(); ++s)
    ASSERT_LE(m.loss_history[s], m.loss_history[s - 1]) << "step " << s << " diff " << (m.loss_history[s] - m.loss_history[s - 1]) / m.loss_history[s];
  const Eigen::MatrixXd ea = to_eigen(a);
  const Eigen::VectorXd ey = to_eigen(y);
  const Eigen::VectorXd vstar = (ea.transpose() * ea).ldlt().solve(ea.transpose() * ey);
  const double best = oracle_loss(ea, ey, vstar);
  EXPECT_LE(std::abs(m.train_loss - best), 1e-6 * best);
  EXPECT_NEAR(oracle_loss(ea, ey, to_eigen(m.coeffs)), m.train_loss, 1e-12);
}

TEST(GdFit, WideProblemConvergesToMinimumNorm) {
  const Matrix a = random_matrix(30, 80, 21);
  const Vec y = random_vec(30, 22);
  GdOptions opt;
  opt.steps = 5000;
  const LinearModel m = gd_fit(a, y, opt);
  const Eigen::MatrixXd ea = to_eigen(a);
  const Eigen::VectorXd vmin = ea.transpose() * (ea * ea.transpose()).ldlt().solve(to_eigen(y));
  EXPECT_LT((to_eigen(m.coeffs) - vmin).norm(), 1e-8 * vmin.norm());
  EXPECT_LT(m.train_loss, 1e-16);
}

TEST(GdFit, ProjectionKeepsBall) {
  for (std::size_t cols : {20u, 60u}) {
    const Matrix a = random_matrix(40, cols, 3 + cols);
    const Vec y = random_vec(40, 4);
    GdOptions opt;
    opt.steps = 500;
    opt.ball_radius = 0.3;
    opt.record_history = true;
    const LinearModel m = gd_fit(a, y, opt);
    for (double vn : m.norm_history) ASSERT_LE(vn, 0.3 + 1e-12);
    EXPECT_LE(norm(m.coeffs), 0.3 + 1e-12);
    for (std::size_t s = 1; s < m.loss_history.size(); ++s) ASSERT_LE(m.loss_history[s], m.loss_history[s - 1] + 1e-15);
  }
}

TEST(GdFit, DivergenceIsReported) {
  const Matrix a = random_matrix(30, 10, 5);
  GdOptions opt;
  opt.steps = 1000;
  opt.step_size = 10.0;
  EXPECT_THROW(gd_fit(a, random_vec(30, 6), opt), DivergenceError);
}

TEST(GdFit, ShapeErrors) {
  EXPECT_THROW(gd_fit(Matrix(3, 2), Vec(2, 0.0), GdOptions{}), std::invalid_argument);
}

namespace {

struct GaussianProblem {
  FeatureBank bank;
  Matrix phi;
  Vec y;
};

GaussianProblem gaussian_problem(int a, std::size_t n_units, std::size_t n_points, std::uint64_t seed) {
  const TargetSpec g = TargetSpec::gaussian({0.0, 0.0}, 1.0);
  SamplerConfig cfg = SamplerConfig::with_default_tail(2, a, 1.0);
  cfg.tabulate = true;
  GaussianProblem p{build_bank(cfg, {standard_basis(2)}, n_units, seed), {}, {}};
  const std::vector<Vec> pts = sample_ball(n_points, 2, 1.0, seed + 1000);
  p.phi = feature_matrix(p.bank, pts);
  for (const Vec& x : pts) p.y.push_back(g(x));
  return p;
}

}  // namespace

TEST(Corrective, DepthZeroEqualsJointFit) {
  const GaussianProblem p = gaussian_problem(0, 32, 200, 1);
  GdOptions opt;
  opt.steps = 300;
  const LinearModel joint = gd_fit(p.phi, p.y, opt);
  const LinearModel corr = corrective_fit(p.bank, p.phi, p.y, opt);
  EXPECT_EQ(joint.coeffs, corr.coeffs);
  EXPECT_EQ(joint.train_loss, corr.train_loss);
  ASSERT_EQ(corr.group_residuals.size(), 1u);
}

TEST(Corrective, ResidualsDecreaseAcrossGroups) {
  const GaussianProblem p = gaussian_problem(1, 512, 2000, 3);
  GdOptions opt;
  opt.steps = 2000;
  const LinearModel corr = corrective_fit(p.bank, p.phi, p.y, opt);
  ASSERT_EQ(corr.group_residuals.size(), 2u);
  EXPECT_LE(corr.group_residuals[1], corr.group_residuals[0]);
  EXPECT_DOUBLE_EQ(corr.train_loss, corr.group_residuals[1]);
  EXPECT_NEAR(mse_on_measure(corr, p.phi, p.y), corr.train_loss, 1e-15);
}

TEST(Corrective, JointFitIsAtLeastAsGood) {
  const GaussianProblem p = gaussian_problem(1, 16, 300, 5);
  GdOptions opt;
  opt.steps = 200000;
  const LinearModel corr = corrective_fit(p.bank, p.phi, p.y, opt);
  const LinearModel joint = gd_fit(p.phi, p.y, opt);
  EXPECT_LE(joint.train_loss, corr.train_loss + 1e-8);
}

TEST(Corrective, ZeroTargets) {
  const GaussianProblem p = gaussian_problem(1, 16, 50, 7);
  const LinearModel corr = corrective_fit(p.bank, p.phi, Vec(50, 0.0), GdOptions{});
  for (double v : corr.coeffs) EXPECT_EQ(v, 0.0);
}

TEST(Targets, MseOnMeasure) {
  const FeatureBank bank = build_bank(SamplerConfig::with_default_tail(2, 0, 1.0), {standard_basis(2)}, 4, 1);
  LinearModel zero;
  zero.coeffs.assign(4, 0.0);
  const TargetSpec c = TargetSpec::custom("const", [](std::span<const double>) { return 1.5; });
  const std::vector<Vec> pts = sample_ball(100, 2, 1.0, 2);
  EXPECT_DOUBLE_EQ(mse_on_measure(zero, bank, c, pts), 2.25);
  LinearModel m;
  m.coeffs = {0.3, -0.2, 0.1, 0.7};
  const TargetSpec exact = TargetSpec::custom("net", [&](std::span<const double> x) { return predict(m, bank, x); });
  EXPECT_EQ(mse_on_measure(m, bank, exact, pts), 0.0);
  EXPECT_THROW(mse_on_measure(m, bank, exact, {}), std::invalid_argument);
}

TEST(Targets, CosineAndGaussian) {
  const TargetSpec cs = TargetSpec::cosine({1.0, 2.0}, 0.5);
  EXPECT_DOUBLE_EQ(cs(Vec{0.25, 0.5}), std::cos(1.75));
  const TargetSpec g = TargetSpec::gaussian({0.0, 0.0}, 1.0);
  EXPECT_DOUBLE_EQ(g(Vec{0.6, 0.8}), std::exp(-0.5));
  EXPECT_FALSE(g.fourier_note.empty());
}

TEST(Targets, SupFourierNormOfGaussian) {
  // q = 1, l = 0: max of (1 + w^2) e^{-w^2/2} / sqrt(2 pi) is at w = 1.
  const TargetSpec g = TargetSpec::gaussian({0.0}, 1.0);
  const double s = sup_fourier_norm(g.radial_spectrum, 1, 0, 20.0, 200001);
  EXPECT_NEAR(s, 2.0 * std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi), 1e-9);
  // Radial spectrum at 0 integrates back to g(0) = 1 in q = 2: 2 pi int rho S(rho) d rho.
  const TargetSpec g2 = TargetSpec::gaussian({0.0, 0.0}, 1.0);
  const double back = 2.0 * std::numbers::pi *
                      cra::testing::simpson([&](double r) { return r * g2.radial_spectrum(r); }, 0.0, 40.0, 200000);
  EXPECT_NEAR(back, 1.0, 1e-10);
}

TEST(Sampling, BallAndCube) {
  for (const Vec& x : sample_ball(1000, 3, 2.0, 4)) EXPECT_LE(norm(x), 2.0);
  for (const Vec& x : sample_cube(1000, 4, 4))
    for (double v : x) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
}

TEST(GdFit, WarmStartMatchesBothModes) {
  for (std::size_t cols : {20u, 70u}) {
    const Matrix a = random_matrix(40, cols, 31 + cols);
    const Vec y = random_vec(40, 32);
    GdOptions opt;
    opt.steps = 20000;
    opt.initial = random_vec(cols, 33);
    opt.record_history = true;
    const LinearModel m = gd_fit(a, y, opt);
    const Eigen::MatrixXd ea = to_eigen(a);
    EXPECT_NEAR(m.loss_history.front(), oracle_loss(ea, to_eigen(y), to_eigen(*opt.initial)), 1e-12);
    for (std::size_t s = 1; s < m.loss_history.size(); ++s) ASSERT_LE(m.loss_history[s], m.loss_history[s - 1]);
    EXPECT_NEAR(oracle_loss(ea, to_eigen(y), to_eigen(m.coeffs)), m.train_loss, 1e-12);
    if (cols > 40) {
      // GD keeps the component of v0 orthogonal to the row space.
      const Eigen::VectorXd v0 = to_eigen(*opt.initial);
      const Eigen::MatrixXd p = ea.transpose() * (ea * ea.transpose()).inverse() * ea;
      const Eigen::VectorXd expected = v0 - p * v0 + ea.transpose() * (ea * ea.transpose()).ldlt().solve(to_eigen(y));
      EXPECT_LT((to_eigen(m.coeffs) - expected).norm(), 1e-8 * expected.norm());
    }
  }
}

TEST(GdFit, WarmStartWithProjection) {
  const Matrix a = random_matrix(30, 90, 41);
  GdOptions opt;
  opt.steps = 300;
  opt.initial = random_vec(90, 42);
  opt.ball_radius = 1.0;
  opt.record_history = true;
  const LinearModel m = gd_fit(a, random_vec(30, 43), opt);
  for (double vn : m.norm_history) ASSERT_LE(vn, 1.0 + 1e-12);
  EXPECT_NEAR(norm(m.coeffs), m.norm_history.back(), 1e-10);
}
