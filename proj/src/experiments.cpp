#include "cra/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>

#include "cra/features.hpp"
#include "cra/kernels.hpp"
#include "cra/memorize.hpp"
#include "cra/parallel.hpp"
#include "cra/poly.hpp"
#include "cra/rng.hpp"

#ifndef CRA_VERSION
#define CRA_VERSION "0.0.0"
#endif

namespace cra::experiments {

namespace {

const char* kExamplePoly = R"([
  {"exponents": [[1, 1], [2, 1]], "coeff": 3},
  {"exponents": [[3, 2]], "coeff": -2},
  {"exponents": [], "coeff": 0.5}
])";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError("field '" + key + "': " + why + " '" + value + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, text, "malformed integer");
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    bad_value(key, text, "malformed number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, text, "malformed boolean");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

// Runs jobs in parallel, keeping the first error.
void run_jobs(std::size_t count, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  parallel_for(count, [&](std::size_t i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::uint64_t> sorted_seeds(const RunConfig& cfg) {
  std::vector<std::uint64_t> s = cfg.seeds;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<std::size_t> sorted_sizes(const RunConfig& cfg) {
  std::vector<std::size_t> s = cfg.N;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

features::TargetSpec make_target(const RunConfig& cfg) {
  if (cfg.target == "gaussian") return features::TargetSpec::gaussian(Vec(cfg.q, 0.0), 1.0);
  if (cfg.target == "cosine") {
    Vec f(cfg.q, 0.0);
    f[0] = cfg.freq;
    return features::TargetSpec::cosine(f, 0.0);
  }
  throw ConfigError("field 'target': unknown target '" + cfg.target + "'");
}

poly::PolySpec load_poly(const RunConfig& cfg) {
  return cfg.coeffs.empty() ? poly::parse_poly_spec(kExamplePoly, cfg.d, cfg.q)
                            : poly::load_poly_spec(cfg.coeffs, cfg.d, cfg.q);
}

}  // namespace

const char* version() { return CRA_VERSION; }

RunConfig RunConfig::defaults(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (command == "approx") c.steps = 20000;
  if (command == "poly") {
    c.d = 6;
    c.q = 2;
    c.a = 1;
    c.N = {2000};
    c.train = 4000;
    c.test = 4000;
  }
  return c;
}

void RunConfig::set(const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "n") n = parse_integer<std::size_t>(key, value);
  else if (key == "d") d = parse_integer<std::size_t>(key, value);
  else if (key == "theta") theta = parse_real(key, value);
  else if (key == "eps") eps = parse_real(key, value);
  else if (key == "delta") delta = parse_real(key, value);
  else if (key == "c0") c0 = parse_real(key, value);
  else if (key == "max-units") max_units = parse_integer<std::size_t>(key, value);
  else if (key == "refit") refit = parse_bool(key, value);
  else if (key == "q") q = parse_integer<int>(key, value);
  else if (key == "a") a = parse_integer<int>(key, value);
  else if (key == "N") {
    try {
      N = parse_size_list(value);
    } catch (const std::invalid_argument& e) {
      bad_value(key, value, e.what());
    }
  } else if (key == "schedule") schedule = trim(value);
  else if (key == "target") target = trim(value);
  else if (key == "radius") radius = parse_real(key, value);
  else if (key == "freq") freq = parse_real(key, value);
  else if (key == "train") train = parse_integer<std::size_t>(key, value);
  else if (key == "test") test = parse_integer<std::size_t>(key, value);
  else if (key == "steps") steps = parse_integer<std::size_t>(key, value);
  else if (key == "coeffs") coeffs = trim(value);
  else if (key == "k") k = parse_integer<int>(key, value);
  else if (key == "grid") grid = parse_integer<std::size_t>(key, value);
  else if (key == "t-max") t_max = parse_real(key, value);
  else if (key == "seeds" || key == "seed") {
    try {
      seeds = parse_seeds(value);
    } catch (const std::invalid_argument& e) {
      bad_value(key, value, e.what());
    }
    if (key == "seed" && seeds.size() != 1) bad_value(key, value, "expected a single seed, got");
  } else if (key == "out") out = trim(value);
  else throw ConfigError("unknown field '" + key + "'");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (seeds.empty()) fail("field 'seeds': empty");
  if (command == "memorize") {
    if (n == 0 || d == 0) fail("fields 'n', 'd': must be positive");
    if (!(theta > 0.0)) fail("field 'theta': must be positive");
    if (!(eps > 0.0 && eps < 1.0)) fail("field 'eps': must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) fail("field 'delta': must lie in (0, 1)");
    if (!(c0 > 0.0)) fail("field 'c0': must be positive");
    if (max_units == 0) fail("field 'max-units': must be positive");
  } else if (command == "approx" || command == "poly") {
    if (q < (command == "poly" ? 0 : 1)) fail("field 'q': out of range");
    if (a < 0) fail("field 'a': must be nonnegative");
    if (N.empty()) fail("field 'N': empty");
    if (train == 0 || test == 0) fail("fields 'train', 'test': must be positive");
    if (command == "approx") {
      features::parse_schedule(schedule);
      if (target != "gaussian" && target != "cosine") fail("field 'target': unknown target '" + target + "'");
      if (!(radius > 0.0)) fail("field 'radius': must be positive");
    }
  } else if (command == "kernel-table") {
    if (k < 0 || k > kernels::kMaxOrder) fail("field 'k': must lie in 0.." + std::to_string(kernels::kMaxOrder));
    if (grid == 0) fail("field 'grid': must be positive");
    if (!(t_max > 0.0)) fail("field 't-max': must be positive");
  } else {
    fail("unknown command '" + command + "'");
  }
}

std::string RunConfig::describe() const {
  std::ostringstream o;
  o << "command=" << command;
  if (command == "memorize") {
    o << " n=" << n << " d=" << d << " theta=" << format_number(theta) << " eps=" << format_number(eps)
      << " delta=" << format_number(delta) << " c0=" << format_number(c0) << " max-units=" << max_units
      << " refit=" << (refit ? "true" : "false");
  } else if (command == "approx") {
    o << " target=" << target;
    if (target == "cosine") o << " freq=" << format_number(freq);
    o << " q=" << q << " a=" << a << " N=" << join(N) << " schedule=" << schedule
      << " radius=" << format_number(radius) << " train=" << train << " test=" << test << " steps=" << steps;
  } else if (command == "poly") {
    o << " coeffs=" << (coeffs.empty() ? "<example>" : coeffs) << " d=" << d << " q=" << q << " a=" << a
      << " N=" << join(N) << " train=" << train << " test=" << test << " steps=" << steps;
  } else if (command == "kernel-table") {
    o << " k=" << k << " grid=" << grid << " t-max=" << format_number(t_max);
  }
  if (command != "kernel-table") o << " seeds=" << join(seeds);
  return o.str();
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& raw : split(text, ',')) {
    const std::string part = trim(raw);
    if (part.empty()) throw std::invalid_argument("empty seed entry in");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_integer<std::uint64_t>("seeds", part));
      continue;
    }
    const auto lo = parse_integer<std::uint64_t>("seeds", part.substr(0, dots));
    const auto hi = parse_integer<std::uint64_t>("seeds", part.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("descending seed range");
    if (hi - lo >= 1000000) throw std::invalid_argument("seed range too long");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("no seeds in");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& part : split(text, ',')) {
    const std::size_t v = parse_integer<std::size_t>("N", part);
    if (v == 0) throw std::invalid_argument("zero size in");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
    try {
      cfg.set(t.substr(0, eq), t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

Table run_memorize(const RunConfig& cfg) {
  const auto seeds = sorted_seeds(cfg);
  std::vector<std::vector<std::vector<std::string>>> rows(seeds.size());
  // Seeds run one after another; each run parallelizes its own rounds.
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::uint64_t seed = seeds[i];
    const auto set = memorize::gen_separated_set(cfg.n, cfg.d, cfg.theta, substream_seed(seed, 0));
    memorize::MemorizeOptions opt;
    opt.max_units_per_round = cfg.max_units;
    opt.refit = cfg.refit;
    const auto r = memorize::memorize(set, cfg.eps, cfg.delta, cfg.c0, substream_seed(seed, 1), opt);
    const std::size_t per_round = r.plan.units_per_round;
    for (std::size_t k = 0; k < r.history.size(); ++k)
      rows[i].push_back({std::to_string(seed), "stacked", std::to_string(k), std::to_string(k * per_round),
                         format_number(r.history[k])});
    if (r.refit_loss)
      rows[i].push_back({std::to_string(seed), "refit", std::to_string(r.history.size() - 1),
                         std::to_string(r.net.units.size()), format_number(*r.refit_loss)});
  }
  Table t{{"seed", "stage", "round", "units_cumulative", "residual_sq_norm"}, {}};
  for (auto& block : rows)
    for (auto& row : block) t.rows.push_back(std::move(row));
  return t;
}

Table run_approx(const RunConfig& cfg) {
  const auto seeds = sorted_seeds(cfg);
  const auto sizes = sorted_sizes(cfg);
  const auto schedule = features::parse_schedule(cfg.schedule);
  const auto target = make_target(cfg);
  const auto q = static_cast<std::size_t>(cfg.q);
  const std::size_t jobs = seeds.size() * sizes.size();
  std::vector<std::vector<std::string>> rows(jobs);
  run_jobs(jobs, [&](std::size_t job) {
    const std::size_t N = sizes[job / seeds.size()];
    const std::uint64_t seed = seeds[job % seeds.size()];
    const auto train = features::sample_ball(cfg.train, q, cfg.radius, substream_seed(seed, 1));
    const auto test = features::sample_ball(cfg.test, q, cfg.radius, substream_seed(seed, 2));
    const auto sc = features::SamplerConfig::with_default_tail(cfg.q, cfg.a, cfg.radius, schedule);
    const auto bank = features::build_bank(sc, {features::standard_basis(q)}, N, substream_seed(seed, 3));
    const Matrix f = features::feature_matrix(bank, train);
    Vec y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) y[i] = target(train[i]);
    features::GdOptions opt;
    opt.steps = cfg.steps;
    const auto model = features::corrective_fit(bank, f, y, opt);
    std::vector<std::string> row = {std::to_string(N),         std::to_string(cfg.a),
                                    cfg.schedule,              std::to_string(seed),
                                    format_number(model.train_loss),
                                    format_number(features::mse_on_measure(model, bank, target, test))};
    for (double g : model.group_residuals) row.push_back(format_number(g));
    rows[job] = std::move(row);
  });
  Table t{{"N", "a", "schedule", "seed", "train_mse", "test_mse"}, std::move(rows)};
  for (int b = cfg.a; b >= 0; --b) t.columns.push_back("residual_level" + std::to_string(b));
  return t;
}

Table run_poly(const RunConfig& cfg) {
  const auto seeds = sorted_seeds(cfg);
  const auto sizes = sorted_sizes(cfg);
  const poly::PolySpec spec = load_poly(cfg);
  const auto m = poly::monomial_count(spec.d, spec.q);
  if (!m) throw std::invalid_argument("too many monomials for d and q");
  const std::size_t jobs = seeds.size() * sizes.size();
  std::vector<std::vector<std::string>> rows(jobs);
  run_jobs(jobs, [&](std::size_t job) {
    const std::size_t N = sizes[job / seeds.size()];
    const std::uint64_t seed = seeds[job % seeds.size()];
    const std::size_t units = poly::round_units(N, *m, cfg.a);
    const auto train = features::sample_cube(cfg.train, spec.d, substream_seed(seed, 1));
    const auto test = features::sample_cube(cfg.test, spec.d, substream_seed(seed, 2));
    poly::LearnOptions opt;
    opt.steps = cfg.steps;
    const auto r = poly::learn_poly(spec, cfg.a, units, train, test, seed, opt);
    rows[job] = {std::to_string(N),    std::to_string(units),      std::to_string(cfg.a),
                 std::to_string(seed), format_number(r.train_mse), format_number(r.test_mse)};
  });
  return Table{{"N", "units", "a", "seed", "train_mse", "test_mse"}, std::move(rows)};
}

Table run_kernel_table(const RunConfig& cfg) {
  const kernels::SmoothingFilter filter(std::max(cfg.k, 1));
  const auto act = kernels::Activation::smooth_relu(cfg.k);
  std::vector<std::vector<std::string>> rows(cfg.grid);
  parallel_for(cfg.grid, [&](std::size_t i) {
    const double t = cfg.grid == 1 ? 0.0
                                   : -cfg.t_max + 2.0 * cfg.t_max * static_cast<double>(i) /
                                                      static_cast<double>(cfg.grid - 1);
    rows[i] = {format_number(t), format_number(std::max(0.0, t)), format_number(act.exact(t)),
               format_number(filter(t)), format_number(filter.fourier(t))};
  });
  return Table{{"t", "relu", "srelu_k", "filter", "filter_fourier"}, std::move(rows)};
}

Table run(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.command == "memorize") return run_memorize(cfg);
  if (cfg.command == "approx") return run_approx(cfg);
  if (cfg.command == "poly") return run_poly(cfg);
  return run_kernel_table(cfg);
}

std::string to_csv(const RunConfig& cfg, const Table& table) {
  std::string out = "# cra " + std::string(version()) + " " + cfg.describe() + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  return out;
}

double slope_fit(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> xs, ys;
  for (const auto& [n, mse] : points) {
    if (!(n > 0.0)) throw std::invalid_argument("slope_fit: N must be positive");
    if (!(mse > 0.0)) throw std::invalid_argument("slope_fit: mse must be positive");
    xs.push_back(std::log(n));
    ys.push_back(std::log(mse));
  }
  std::vector<double> distinct;
  for (const auto& [n, mse] : points) distinct.push_back(n);
  std::sort(distinct.begin(), distinct.end());
  if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3)
    throw std::invalid_argument("slope_fit: need at least three distinct N");
  const double mx = pairwise_sum(xs) / static_cast<double>(xs.size());
  const double my = pairwise_sum(ys) / static_cast<double>(ys.size());
  Vec sxy(xs.size()), sxx(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy[i] = (xs[i] - mx) * (ys[i] - my);
    sxx[i] = (xs[i] - mx) * (xs[i] - mx);
  }
  return pairwise_sum(sxy) / pairwise_sum(sxx);
}

}  // namespace cra::experiments
