#include "vdbtherm/cli/csv.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "vdbtherm/cli/config.hpp"

namespace vdbtherm::cli {

namespace {

const std::map<std::string, std::vector<std::string>>& schemas() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"single",
       {"T", "beta", "a_m0", "a_mp", "a_0m", "a_0p", "a_pm", "a_p0", "omega_dis", "gamma",
        "regime", "osc_count", "im_lambda", "c", "rhs_eq7", "residual_minus", "residual_zero",
        "residual_plus"}},
      {"trajectory", {"t", "P_minus", "P_zero", "P_plus", "dP_plus_rescaled"}},
      {"freq_curve", {"T", "gamma", "regime", "osc_count", "im_lambda", "re_lambda", "omega_dis"}},
      {"phase_diagram", {"V1", "T", "gamma", "regime", "osc_count", "c", "rhs_eq7"}},
      {"tep_scan", {"V1", "T_EP", "gamma_normalized", "sign_changes", "status"}},
      {"lowT_scan",
       {"beta_gap", "beta", "T", "ratio_0m", "ratio_pm", "ratio_p0", "triangular_distance",
        "gamma_sign", "gamma_normalized", "down_ratio_min", "down_ratio_max", "xi_lower",
        "xi_upper"}},
      {"bound_scan",
       {"V2", "V3", "e_vdb", "gap_term", "e_low_energy", "low_energy_ratio", "satisfied",
        "limit_margin", "gamma_normalized_high_T", "status"}},
  };
  return s;
}

}  // namespace

const std::vector<std::string>& schema_columns(const std::string& schema_id) {
  return schemas().at(schema_id);
}

Table make_table(const std::string& schema_id) {
  return Table{schema_id, schema_columns(schema_id), {}};
}

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(long long x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

void emit_csv(const Table& table, const std::vector<std::string>& comments, std::ostream& out) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.columns.size())
      throw std::invalid_argument("emit_csv: row " + std::to_string(r) + " of '" + table.schema_id +
                                  "' has " + std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(table.columns.size()));
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

void emit_csv(const Table& table, const std::vector<std::string>& comments,
              const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
  emit_csv(table, comments, f);
  f.flush();
  if (!f) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
}

}  // namespace vdbtherm::cli
