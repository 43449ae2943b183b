#pragma once

// Batch experiment driver behind the `cra` command line tool.
//
// A run is described by a RunConfig, filled from command line flags or from
// a key=value file whose keys mirror the flag names. Every run produces one
// table; to_csv renders it with a leading comment line that records the
// library version and the full configuration.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cra::experiments {

const char* version();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // memorize, approx, poly, kernel-table

  // memorize
  std::size_t n = 64;
  std::size_t d = 8;
  double theta = 0.5;
  double eps = 1e-2;
  double delta = 0.25;
  double c0 = 4.0;
  std::size_t max_units = 16384;
  bool refit = true;

  // approx and poly
  int q = 2;
  int a = 0;
  std::vector<std::size_t> N = {64, 128, 256, 512, 1024};
  std::string schedule = "sup";
  std::string target = "gaussian";
  double radius = 1.0;
  double freq = 3.0;  // cosine target cos(freq x_1)
  std::size_t train = 2048;
  std::size_t test = 10000;
  std::size_t steps = 10000;
  std::string coeffs;  // polynomial spec file; the built-in example when empty

  // kernel-table
  int k = 2;
  std::size_t grid = 1001;
  double t_max = 3.0;

  std::vector<std::uint64_t> seeds = {1};
  std::string out;

  /// Defaults for a command; poly switches d, q, a, N, train and test to its
  /// own example sizes.
  static RunConfig defaults(const std::string& command);

  /// Sets one field from its flag name (without dashes). "seed" is an alias
  /// for a single-element "seeds". Throws ConfigError naming the field.
  void set(const std::string& key, const std::string& value);

  /// Throws ConfigError for values outside the module preconditions that can
  /// be checked without running anything.
  void validate() const;

  /// Canonical "key=value" list of the fields used by the command.
  std::string describe() const;
};

/// "3", "1..10" (inclusive) or comma-separated mixtures such as "1,4..6".
std::vector<std::uint64_t> parse_seeds(const std::string& text);
/// Comma-separated positive sizes.
std::vector<std::size_t> parse_size_list(const std::string& text);

/// Applies key=value lines from text. Blank lines and lines starting with '#'
/// are skipped; errors carry the 1-based line number and the field.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest round-trip formatting, so equal doubles print identically.
std::string format_number(double x);

/// Runs the experiment for every seed and sweep point. Rows are sorted by
/// their sweep keys before returning.
Table run(const RunConfig& cfg);

Table run_memorize(const RunConfig& cfg);
Table run_approx(const RunConfig& cfg);
Table run_poly(const RunConfig& cfg);
Table run_kernel_table(const RunConfig& cfg);

/// "# cra <version> <describe()>", the column header, then the rows.
std::string to_csv(const RunConfig& cfg, const Table& table);

/// Least-squares slope of log(mse) against log(N). Requires at least three
/// distinct N; throws std::invalid_argument for nonpositive N or mse.
double slope_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace cra::experiments
