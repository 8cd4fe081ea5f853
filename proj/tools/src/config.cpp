#include "vdbtherm/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "vdbtherm/errors.hpp"

namespace vdbtherm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  double x = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto r = std::from_chars(first, last, x);
  if (r.ec != std::errc{} || r.ptr != last) throw std::invalid_argument("expected a number, got '" + s + "'");
  return x;
}

long long to_int(const std::string& s) {
  long long x = 0;
  const auto* last = s.data() + s.size();
  auto r = std::from_chars(s.data(), last, x);
  if (r.ec != std::errc{} || r.ptr != last) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return x;
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

bool to_spacing(const std::string& s) {
  if (s == "log") return true;
  if (s == "linear") return false;
  throw std::invalid_argument("spacing must be 'log' or 'linear', got '" + s + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Registry = std::map<std::string, std::map<std::string, Setter>>;

void add_axis(std::map<std::string, Setter>& sec, const std::string& name, Axis ExperimentConfig::*axis) {
  sec[name + "_min"] = [axis](ExperimentConfig& c, const std::string& v) { (c.*axis).min = to_double(v); };
  sec[name + "_max"] = [axis](ExperimentConfig& c, const std::string& v) { (c.*axis).max = to_double(v); };
  sec[name + "_count"] = [axis](ExperimentConfig& c, const std::string& v) {
    (c.*axis).count = static_cast<int>(to_int(v));
  };
  sec[name + "_spacing"] = [axis](ExperimentConfig& c, const std::string& v) { (c.*axis).log = to_spacing(v); };
  sec[name + "_values"] = [axis](ExperimentConfig& c, const std::string& v) {
    (c.*axis).explicit_values = to_list(v);
  };
}

const Registry& registry() {
  static const Registry reg = [] {
    Registry r;
    auto& run = r["run"];
    run["mode"] = [](ExperimentConfig& c, const std::string& v) {
      auto m = parse_mode(v);
      if (!m) throw std::invalid_argument("unknown mode '" + v + "'");
      c.mode = *m;
    };
    run["out"] = [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; };
    run["threads"] = [](ExperimentConfig& c, const std::string& v) {
      c.threads = static_cast<int>(to_int(v));
      c.threads_set = true;
    };
    run["seed"] = [](ExperimentConfig& c, const std::string& v) {
      c.seed = static_cast<unsigned long long>(to_int(v));
    };

    auto& sys = r["system"];
    sys["tau"] = [](ExperimentConfig& c, const std::string& v) { c.system.tau = to_double(v); };
    sys["phi"] = [](ExperimentConfig& c, const std::string& v) { c.system.phi = to_double(v); };
    sys["V1"] = [](ExperimentConfig& c, const std::string& v) { c.system.potentials[0] = to_double(v); };
    sys["V2"] = [](ExperimentConfig& c, const std::string& v) { c.system.potentials[1] = to_double(v); };
    sys["V3"] = [](ExperimentConfig& c, const std::string& v) { c.system.potentials[2] = to_double(v); };
    sys["mass"] = [](ExperimentConfig& c, const std::string& v) { c.system.mass = to_double(v); };
    sys["hbar"] = [](ExperimentConfig& c, const std::string& v) { c.system.hbar = to_double(v); };
    sys["k_B"] = [](ExperimentConfig& c, const std::string& v) { c.system.k_boltzmann = to_double(v); };
    sys["nu"] = [](ExperimentConfig& c, const std::string& v) { c.system.gas_density = to_double(v); };

    auto& grid = r["grid"];
    add_axis(grid, "T", &ExperimentConfig::T);
    add_axis(grid, "V1", &ExperimentConfig::V1);
    add_axis(grid, "V2", &ExperimentConfig::V2);
    add_axis(grid, "V3", &ExperimentConfig::V3);
    add_axis(grid, "beta_gap", &ExperimentConfig::beta_gap);
    grid["T_unit"] = [](ExperimentConfig& c, const std::string& v) {
      if (v == "gap") c.T_in_gap_units = true;
      else if (v == "absolute") c.T_in_gap_units = false;
      else throw std::invalid_argument("T_unit must be 'absolute' or 'gap', got '" + v + "'");
    };

    r["single"]["T"] = [](ExperimentConfig& c, const std::string& v) { c.T_single = to_double(v); };

    auto& tr = r["trajectory"];
    tr["T"] = [](ExperimentConfig& c, const std::string& v) { c.T_trajectory = to_double(v); };
    tr["initial"] = [](ExperimentConfig& c, const std::string& v) {
      auto l = to_list(v);
      if (l.size() != 3) throw std::invalid_argument("initial needs three values (P-, P0, P+)");
      c.initial = {l[0], l[1], l[2]};
    };
    tr["span_slow"] = [](ExperimentConfig& c, const std::string& v) { c.span_slow = to_double(v); };
    tr["t_count"] = [](ExperimentConfig& c, const std::string& v) { c.t_count = static_cast<int>(to_int(v)); };

    auto& tep = r["tep"];
    tep["T_min"] = [](ExperimentConfig& c, const std::string& v) { c.tep_T_min = to_double(v); };
    tep["T_max"] = [](ExperimentConfig& c, const std::string& v) { c.tep_T_max = to_double(v); };

    auto& bound = r["bound"];
    bound["beta_probe"] = [](ExperimentConfig& c, const std::string& v) { c.beta_probe = to_double(v); };
    bound["T_check"] = [](ExperimentConfig& c, const std::string& v) { c.T_check = to_double(v); };

    auto& tol = r["tolerances"];
    tol["rate_tol"] = [](ExperimentConfig& c, const std::string& v) { c.rate_tol = to_double(v); };
    tol["lep_eps"] = [](ExperimentConfig& c, const std::string& v) { c.lep_eps = to_double(v); };
    tol["lep_tol"] = [](ExperimentConfig& c, const std::string& v) { c.lep_tol = to_double(v); };
    tol["tep_tol"] = [](ExperimentConfig& c, const std::string& v) { c.tep_tol = to_double(v); };
    return r;
  }();
  return reg;
}

std::string axis_lines(const std::string& name, const Axis& a) {
  std::ostringstream os;
  if (!a.explicit_values.empty()) {
    os << name << "_values = ";
    for (std::size_t i = 0; i < a.explicit_values.size(); ++i)
      os << (i ? ", " : "") << format_double(a.explicit_values[i]);
    return os.str();
  }
  os << name << "_min = " << format_double(a.min) << "\n"
     << name << "_max = " << format_double(a.max) << "\n"
     << name << "_count = " << a.count << "\n"
     << name << "_spacing = " << (a.log ? "log" : "linear");
  return os.str();
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what
                                  : source + ": " + what),
      line_(line) {}

const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::single: return "single";
    case Mode::trajectory: return "trajectory";
    case Mode::freq_curve: return "freq_curve";
    case Mode::phase_diagram: return "phase_diagram";
    case Mode::tep_scan: return "tep_scan";
    case Mode::lowT_scan: return "lowT_scan";
    case Mode::bound_scan: return "bound_scan";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::single, Mode::trajectory, Mode::freq_curve, Mode::phase_diagram,
                 Mode::tep_scan, Mode::lowT_scan, Mode::bound_scan})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::vector<double> Axis::values() const {
  if (!explicit_values.empty()) return explicit_values;
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    v[i] = log ? min * std::pow(max / min, f) : min + (max - min) * f;
  }
  if (count > 1) v.back() = max;
  return v;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<std::string> ExperimentConfig::canonical() const {
  std::vector<std::string> out;
  auto push_block = [&out](const std::string& block) {
    std::stringstream ss(block);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
  };
  auto kv = [](const std::string& k, const std::string& v) { return k + " = " + v; };
  out.push_back("[run]");
  out.push_back(kv("mode", to_string(mode)));
  out.push_back(kv("seed", std::to_string(seed)));
  out.push_back("[system]");
  out.push_back(kv("tau", format_double(system.tau)));
  out.push_back(kv("phi", format_double(system.phi)));
  out.push_back(kv("V1", format_double(system.potentials[0])));
  out.push_back(kv("V2", format_double(system.potentials[1])));
  out.push_back(kv("V3", format_double(system.potentials[2])));
  out.push_back(kv("mass", format_double(system.mass)));
  out.push_back(kv("hbar", format_double(system.hbar)));
  out.push_back(kv("k_B", format_double(system.k_boltzmann)));
  out.push_back(kv("nu", format_double(system.gas_density)));
  out.push_back("[grid]");
  push_block(axis_lines("T", T));
  out.push_back(kv("T_unit", T_in_gap_units ? "gap" : "absolute"));
  push_block(axis_lines("V1", V1));
  push_block(axis_lines("V2", V2));
  push_block(axis_lines("V3", V3));
  push_block(axis_lines("beta_gap", beta_gap));
  out.push_back("[single]");
  out.push_back(kv("T", format_double(T_single)));
  out.push_back("[trajectory]");
  out.push_back(kv("T", format_double(T_trajectory)));
  out.push_back(kv("initial", format_double(initial[0]) + ", " + format_double(initial[1]) +
                                  ", " + format_double(initial[2])));
  out.push_back(kv("span_slow", format_double(span_slow)));
  out.push_back(kv("t_count", std::to_string(t_count)));
  out.push_back("[tep]");
  out.push_back(kv("T_min", format_double(tep_T_min)));
  out.push_back(kv("T_max", format_double(tep_T_max)));
  out.push_back("[bound]");
  out.push_back(kv("beta_probe", format_double(beta_probe)));
  out.push_back(kv("T_check", format_double(T_check)));
  out.push_back("[tolerances]");
  out.push_back(kv("rate_tol", format_double(rate_tol)));
  out.push_back(kv("lep_eps", format_double(lep_eps)));
  out.push_back(kv("lep_tol", format_double(lep_tol)));
  out.push_back(kv("tep_tol", format_double(tep_tol)));
  return out;
}

void ExperimentConfig::validate(const std::string& source) const {
  auto fail = [&](const std::string& what) { throw ConfigError(source, 0, what); };
  try {
    system.validate();
  } catch (const vdbtherm::InputError& e) {
    fail(e.what());
  }
  auto check_axis = [&](const char* name, const Axis& a, bool positive) {
    const auto v = a.values();
    if (a.explicit_values.empty()) {
      if (a.count < 2) fail(std::string(name) + "_count must be at least 2");
      if (!(a.max > a.min)) fail(std::string(name) + "_max must exceed " + name + "_min");
      if (a.log && !(a.min > 0.0)) fail(std::string(name) + ": log spacing needs a positive minimum");
    }
    for (double x : v) {
      if (!std::isfinite(x)) fail(std::string(name) + " values must be finite");
      if (positive && !(x > 0.0)) fail(std::string(name) + " values must be positive");
    }
  };
  switch (mode) {
    case Mode::freq_curve:
      check_axis("T", T, true);
      break;
    case Mode::phase_diagram:
      check_axis("T", T, true);
      check_axis("V1", V1, false);
      break;
    case Mode::tep_scan:
      check_axis("V1", V1, false);
      break;
    case Mode::lowT_scan:
      check_axis("beta_gap", beta_gap, true);
      break;
    case Mode::bound_scan:
      check_axis("V2", V2, false);
      check_axis("V3", V3, false);
      break;
    default:
      break;
  }
  if (!(T_single > 0.0)) fail("single T must be positive");
  if (!(T_trajectory > 0.0)) fail("trajectory T must be positive");
  double s = 0.0;
  for (double p : initial) {
    if (!(p >= 0.0 && p <= 1.0)) fail("initial populations must lie in [0, 1]");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9) fail("initial populations must sum to 1");
  if (!(span_slow > 0.0)) fail("span_slow must be positive");
  if (t_count < 2) fail("t_count must be at least 2");
  if (!(tep_T_min > 0.0 && tep_T_max > tep_T_min)) fail("tep bracket must satisfy 0 < T_min < T_max");
  if (!(beta_probe > 0.0)) fail("beta_probe must be positive");
  if (!(T_check > 0.0)) fail("T_check must be positive");
  for (auto [name, x] : {std::pair{"rate_tol", rate_tol}, {"lep_eps", lep_eps},
                         {"lep_tol", lep_tol}, {"tep_tol", tep_tol}})
    if (!(x > 0.0 && x < 1.0)) fail(std::string(name) + " must lie in (0, 1)");
  if (threads_set && threads < 0) fail("threads must be nonnegative");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  const auto& reg = registry();
  std::string section = "run";
  std::set<std::string> seen;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, lineno, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!reg.count(section)) throw ConfigError(source, lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, lineno, "expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, lineno, "empty key");
    const auto& sec = reg.at(section);
    auto it = sec.find(key);
    if (it == sec.end()) throw ConfigError(source, lineno, "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(source, lineno, "duplicate key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(source, lineno, "missing value for '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, lineno, key + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  auto cfg = parse_config(in, path.string());
  return cfg;
}

}  // namespace vdbtherm::cli
