#pragma once

// Low-degree polynomial targets f(x) = sum_V J_V prod_j x_j^{V(j)} and the
// random-features pipeline that learns them: one coordinate subspace B_V per
// monomial, a shared bank over all subspaces, GD on the outer layer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cra/features.hpp"
#include "cra/linalg.hpp"

namespace cra::poly {

/// Sorted (coordinate, power) pairs with positive powers. Coordinates are
/// 0-based in the API.
struct Monomial {
  std::vector<std::pair<std::size_t, int>> exponents;

  int degree() const;
  double operator()(std::span<const double> x) const;
  std::string to_string() const;  // e.g. "x1^2*x3", "1" for the constant; 1-based names
  bool operator==(const Monomial&) const = default;
};

/// Builds a monomial from unsorted pairs, merging repeated coordinates.
Monomial make_monomial(std::vector<std::pair<std::size_t, int>> exponents);

struct Term {
  Monomial mono;
  double coeff = 0.0;
};

struct PolySpec {
  std::size_t d = 0;
  int q = 0;
  std::vector<Term> terms;

  /// Throws std::invalid_argument on repeated monomials, degrees above q,
  /// coordinates outside [0, d) or non-finite coefficients.
  void validate() const;
};

/// Parses a JSON list of {"exponents": [[coord, power], ...], "coeff": c}
/// with 1-based coordinates, or an object {"d": .., "q": .., "terms": [...]}.
/// d and q from the object override the arguments; q defaults to the largest
/// term degree when passed as a negative value.
PolySpec parse_poly_spec(const std::string& json_text, std::size_t d, int q = -1);
PolySpec load_poly_spec(const std::string& path, std::size_t d, int q = -1);

/// C(q + d, q), or nullopt when it exceeds 10^6.
std::optional<std::size_t> monomial_count(std::size_t d, int q);

/// All monomials of degree <= q in graded lexicographic order:
/// 1, x1, .., xd, x1^2, x1 x2, .., xd^2, ... Requires q <= d.
std::vector<Monomial> enum_monomials(std::size_t d, int q);

/// Unit vectors of the active coordinates in increasing order, padded with
/// the lowest unused coordinates to exactly q vectors.
features::Basis basis_for_monomial(const Monomial& mono, std::size_t d, int q);

double poly_eval(const PolySpec& spec, std::span<const double> x);

/// Smallest multiple of m (a + 1) that is >= n.
std::size_t round_units(std::size_t n, std::size_t m, int a);

struct LearnOptions {
  std::size_t steps = 3000;
  std::optional<double> ball_radius;
  bool tabulate = true;
};

struct LearnResult {
  features::FeatureBank bank;
  features::LinearModel model;
  std::size_t n_units = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

/// Fits spec on train points (draws from zeta) and reports the MSE on the
/// test points. Uses r = sqrt(q), l = max(q + 3, 3a + 3), the sup schedule
/// and one subspace per monomial of degree <= q. N must be divisible by
/// m (a + 1), m = C(q + d, q).
LearnResult learn_poly(const PolySpec& spec, int a, std::size_t n_units, const std::vector<Vec>& train,
                       const std::vector<Vec>& test, std::uint64_t seed, const LearnOptions& options = {});

}  // namespace cra::poly
