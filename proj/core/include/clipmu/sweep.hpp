#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clipmu/analytic_mu.hpp"
#include "clipmu/mc_oracle.hpp"
#include "clipmu/model.hpp"
#include "clipmu/quadrature.hpp"

namespace clipmu {

/// Raised for malformed run configurations. `key` is the offending field name
/// and `location` its JSON pointer, e.g. "/problem/sigma_v".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::string location, const std::string& what);

  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  [[nodiscard]] const std::string& location() const noexcept { return location_; }

 private:
  std::string key_;
  std::string location_;
};

enum class SweepMethod { kAnalytic, kMc, kBoth };
enum class OutputFormat { kCsv, kJson };

[[nodiscard]] const char* to_string(SweepMethod m) noexcept;
[[nodiscard]] SweepMethod parse_method(std::string_view name);
[[nodiscard]] OutputFormat parse_format(std::string_view name);

struct SweepConfig {
  explicit SweepConfig(ProblemSpec p) : problem(std::move(p)) {}

  ProblemSpec problem;
  Family family = Family::kPrior;
  std::vector<SPair> s_pairs;
  std::vector<std::pair<double, double>> h_grid;
  std::vector<double> x_grid;
  SweepMethod method = SweepMethod::kBoth;
  McConfig mc;
  QuadratureRule quadrature;
  /// "-" writes to standard output.
  std::string output_path = "-";
  OutputFormat output_format = OutputFormat::kCsv;
};

[[nodiscard]] SweepConfig parse_config(std::string_view text);

struct SweepRow {
  Family family = Family::kPrior;
  int s1 = 0;
  int s2 = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  std::optional<double> x;
  std::optional<double> mu_analytic;
  std::string method_tag;
  std::optional<double> mu_mc;
  std::optional<double> mc_stderr;
  std::optional<double> abs_diff;
  std::optional<double> z_score;
  /// '|'-separated: "clamped", "nonconverged".
  std::string flags;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// True when some row's z-score exceeds `limit`.
  [[nodiscard]] bool regressed(double limit = 5.0) const;
};

/// Rows come out in grid order (s pair, then h, then x) whatever the thread count.
[[nodiscard]] SweepTable run_sweep(const SweepConfig& cfg);

void write_csv(const SweepTable& table, std::ostream& out);
void write_json(const SweepTable& table, std::ostream& out);

/// Shortest representation that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

}  // namespace clipmu
