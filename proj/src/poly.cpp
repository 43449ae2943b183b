#include "cra/poly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cra/parallel.hpp"
#include "cra/rng.hpp"
#include "json.hpp"

namespace cra::poly {

namespace {

constexpr std::size_t kMaxMonomials = 1000000;

}  // namespace

int Monomial::degree() const {
  int s = 0;
  for (const auto& [c, p] : exponents) s += p;
  return s;
}

double Monomial::operator()(std::span<const double> x) const {
  double v = 1.0;
  for (const auto& [c, p] : exponents) {
    if (c >= x.size()) throw std::invalid_argument("monomial: coordinate outside the input dimension");
    for (int k = 0; k < p; ++k) v *= x[c];
  }
  return v;
}

std::string Monomial::to_string() const {
  if (exponents.empty()) return "1";
  std::string out;
  for (const auto& [c, p] : exponents) {
    if (!out.empty()) out += '*';
    out += "x" + std::to_string(c + 1);
    if (p > 1) out += "^" + std::to_string(p);
  }
  return out;
}

Monomial make_monomial(std::vector<std::pair<std::size_t, int>> exponents) {
  std::map<std::size_t, int> merged;
  for (const auto& [c, p] : exponents) {
    if (p < 0) throw std::invalid_argument("monomial: negative power");
    merged[c] += p;
  }
  Monomial m;
  for (const auto& [c, p] : merged)
    if (p > 0) m.exponents.emplace_back(c, p);
  return m;
}

void PolySpec::validate() const {
  if (d == 0) throw std::invalid_argument("polynomial: d must be positive");
  if (q < 0) throw std::invalid_argument("polynomial: q must be nonnegative");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("polynomial: non-finite coefficient");
    if (t.mono.degree() > q)
      throw std::invalid_argument("polynomial: term " + t.mono.to_string() + " has degree above q=" + std::to_string(q));
    for (const auto& [c, p] : t.mono.exponents)
      if (c >= d) throw std::invalid_argument("polynomial: term " + t.mono.to_string() + " uses a coordinate beyond d");
    for (std::size_t j = 0; j < i; ++j)
      if (terms[j].mono == t.mono) throw std::invalid_argument("polynomial: repeated monomial " + t.mono.to_string());
  }
}

PolySpec parse_poly_spec(const std::string& json_text, std::size_t d, int q) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("polynomial spec: ") + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (doc.contains("d")) d = doc.at("d").get<std::size_t>();
    if (doc.contains("q")) q = doc.at("q").get<int>();
    if (!doc.contains("terms")) throw std::invalid_argument("polynomial spec: object without \"terms\"");
    list = &doc.at("terms");
  }
  if (!list->is_array()) throw std::invalid_argument("polynomial spec: expected a list of terms");
  PolySpec spec;
  spec.d = d;
  int max_degree = 0;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const nlohmann::json& t = (*list)[i];
    const std::string where = "polynomial spec: term " + std::to_string(i + 1);
    if (!t.is_object() || !t.contains("coeff")) throw std::invalid_argument(where + " needs \"coeff\"");
    std::vector<std::pair<std::size_t, int>> ex;
    if (t.contains("exponents")) {
      for (const nlohmann::json& pair : t.at("exponents")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
          throw std::invalid_argument(where + ": exponents must be [coord, power] integer pairs");
        const long coord = pair[0].get<long>();
        const long power = pair[1].get<long>();
        if (coord < 1) throw std::invalid_argument(where + ": coordinates are numbered from 1");
        if (power < 1) throw std::invalid_argument(where + ": powers must be positive");
        ex.emplace_back(static_cast<std::size_t>(coord - 1), static_cast<int>(power));
      }
    }
    if (!t.at("coeff").is_number()) throw std::invalid_argument(where + ": coeff must be a number");
    Term term{make_monomial(std::move(ex)), t.at("coeff").get<double>()};
    max_degree = std::max(max_degree, term.mono.degree());
    spec.terms.push_back(std::move(term));
  }
  spec.q = q < 0 ? max_degree : q;
  spec.validate();
  return spec;
}

PolySpec load_poly_spec(const std::string& path, std::size_t d, int q) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open polynomial spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_poly_spec(ss.str(), d, q);
}

std::optional<std::size_t> monomial_count(std::size_t d, int q) {
  if (q < 0) return std::nullopt;
  // C(q + d, q) built incrementally; every partial product is itself a binomial.
  std::size_t c = 1;
  for (int i = 1; i <= q; ++i) {
    c = c * (d + static_cast<std::size_t>(i)) / static_cast<std::size_t>(i);
    if (c > kMaxMonomials) return std::nullopt;
  }
  return c;
}

std::vector<Monomial> enum_monomials(std::size_t d, int q) {
  if (q < 0) throw std::invalid_argument("enum_monomials: q must be nonnegative");
  if (static_cast<std::size_t>(q) > d) throw std::invalid_argument("enum_monomials: q must not exceed d");
  if (!monomial_count(d, q)) throw std::invalid_argument("enum_monomials: more than 10^6 monomials");
  std::vector<Monomial> out;
  out.push_back(Monomial{});
  for (int t = 1; t <= q; ++t) {
    // Non-decreasing index tuples i_1 <= .. <= i_t in lexicographic order.
    std::vector<std::size_t> idx(static_cast<std::size_t>(t), 0);
    while (true) {
      std::vector<std::pair<std::size_t, int>> ex;
      for (std::size_t c : idx) ex.emplace_back(c, 1);
      out.push_back(make_monomial(std::move(ex)));
      int pos = t - 1;
      while (pos >= 0 && idx[pos] == d - 1) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int k = pos + 1; k < t; ++k) idx[k] = idx[pos];
    }
  }
  return out;
}

features::Basis basis_for_monomial(const Monomial& mono, std::size_t d, int q) {
  if (q < 1) throw std::invalid_argument("basis_for_monomial: q must be positive");
  if (static_cast<std::size_t>(q) > d) throw std::invalid_argument("basis_for_monomial: q must not exceed d");
  if (mono.exponents.size() > static_cast<std::size_t>(q))
    throw std::invalid_argument("basis_for_monomial: more active coordinates than q");
  std::vector<std::size_t> coords;
  for (const auto& [c, p] : mono.exponents) {
    if (c >= d) throw std::invalid_argument("basis_for_monomial: coordinate beyond d");
    coords.push_back(c);
  }
  for (std::size_t c = 0; coords.size() < static_cast<std::size_t>(q); ++c)
    if (std::find(coords.begin(), coords.end(), c) == coords.end()) coords.push_back(c);
  features::Basis basis;
  for (std::size_t c : coords) {
    Vec e(d, 0.0);
    e[c] = 1.0;
    basis.push_back(std::move(e));
  }
  return basis;
}

double poly_eval(const PolySpec& spec, std::span<const double> x) {
  if (x.size() != spec.d) throw std::invalid_argument("poly_eval: input dimension differs from d");
  Vec terms(spec.terms.size());
  for (std::size_t i = 0; i < spec.terms.size(); ++i) terms[i] = spec.terms[i].coeff * spec.terms[i].mono(x);
  return pairwise_sum(terms);
}

std::size_t round_units(std::size_t n, std::size_t m, int a) {
  const std::size_t unit = m * static_cast<std::size_t>(a + 1);
  if (unit == 0) throw std::invalid_argument("round_units: m(a+1) must be positive");
  return std::max<std::size_t>(1, (n + unit - 1) / unit) * unit;
}

LearnResult learn_poly(const PolySpec& spec, int a, std::size_t n_units, const std::vector<Vec>& train,
                       const std::vector<Vec>& test, std::uint64_t seed, const LearnOptions& options) {
  spec.validate();
  if (spec.q < 1) throw std::invalid_argument("learn_poly: q must be at least 1");
  if (train.empty() || test.empty()) throw std::invalid_argument("learn_poly: empty sample set");
  const std::vector<Monomial> monos = enum_monomials(spec.d, spec.q);
  std::vector<features::Basis> bases;
  for (const Monomial& m : monos) bases.push_back(basis_for_monomial(m, spec.d, spec.q));

  features::SamplerConfig cfg =
      features::SamplerConfig::with_default_tail(spec.q, a, std::sqrt(static_cast<double>(spec.q)));
  cfg.tabulate = options.tabulate;

  LearnResult res;
  res.n_units = n_units;
  res.bank = features::build_bank(cfg, bases, n_units, seed);

  auto targets = [&](const std::vector<Vec>& pts) {
    Vec y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) y[i] = poly_eval(spec, pts[i]);
    return y;
  };
  const Vec y_train = targets(train);
  const Matrix phi = features::feature_matrix(res.bank, train);
  features::GdOptions gd;
  gd.steps = options.steps;
  gd.ball_radius = options.ball_radius;
  res.model = features::gd_fit(phi, y_train, gd);
  res.train_mse = res.model.train_loss;
  const Matrix phi_test = features::feature_matrix(res.bank, test);
  res.test_mse = features::mse_on_measure(res.model, phi_test, targets(test));
  return res;
}

}  // namespace cra::poly
