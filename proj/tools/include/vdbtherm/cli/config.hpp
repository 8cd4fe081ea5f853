#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdbtherm/model.hpp"

namespace vdbtherm::cli {

/// Parse or validation failure, pinned to a line of the source when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class Mode { single, trajectory, freq_curve, phase_diagram, tep_scan, lowT_scan, bound_scan };

const char* to_string(Mode m) noexcept;
std::optional<Mode> parse_mode(const std::string& s);

/// A 1D axis: either [min, max] with count points or an explicit list.
struct Axis {
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  bool log = false;
  std::vector<double> explicit_values;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  SystemSpec system;
  Mode mode = Mode::single;

  // [grid]
  Axis T{0.5, 50.0, 40, true, {}};
  bool T_in_gap_units = false;  // T values measured in units of E+ - E-
  Axis V1{0.0, 8.0, 40, false, {}};
  Axis V2{0.0, 8.0, 21, false, {}};
  Axis V3{0.0, 8.0, 21, false, {}};
  Axis beta_gap{10.0, 40.0, 4, false, {}};  // beta (E+ - E-) for lowT_scan

  // [single]
  double T_single = 3.0;

  // [trajectory]
  double T_trajectory = 16.0;
  std::array<double, 3> initial{0.893, 0.04, 0.067};  // P-, P0, P+
  double span_slow = 10.0;  // t_max in units of t_slow
  int t_count = 201;

  // [tep]
  double tep_T_min = 0.05;
  double tep_T_max = 50.0;

  // [bound]
  double beta_probe = 1e-5;
  double T_check = 1e3;

  // [tolerances]
  double rate_tol = 1e-9;
  double lep_eps = 1e-8;
  double lep_tol = 1e-7;
  double tep_tol = 1e-6;

  // [run]
  std::filesystem::path out_dir = ".";
  int threads = 0;
  bool threads_set = false;
  unsigned long long seed = 0;

  /// Canonical "key = value" lines, grouped by section.
  std::vector<std::string> canonical() const;

  /// Checks cross-field invariants; throws ConfigError with line 0.
  void validate(const std::string& source = "<config>") const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace vdbtherm::cli
