#include "vdbtherm/cli/runner.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "vdbtherm/cli/parallel.hpp"
#include "vdbtherm/dynamics.hpp"
#include "vdbtherm/errors.hpp"
#include "vdbtherm/spectral.hpp"

namespace vdbtherm::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell_name(std::initializer_list<std::pair<const char*, double>> coords) {
  std::ostringstream os;
  bool first = true;
  for (auto [k, v] : coords) {
    os << (first ? "" : ", ") << k << "=" << format_double(v);
    first = false;
  }
  return os.str();
}

template <class F>
auto guarded(const std::string& cell, F&& f) {
  try {
    return f();
  } catch (const vdbtherm::Error& e) {
    throw NumericalFailure(cell, e.what());
  }
}

SystemSpec with_potentials(SystemSpec s, std::optional<double> v1, std::optional<double> v2,
                           std::optional<double> v3) {
  if (v1) s.potentials[0] = *v1;
  if (v2) s.potentials[1] = *v2;
  if (v3) s.potentials[2] = *v3;
  return s;
}

double level_gap(const ExperimentConfig& cfg) {
  const auto sp = guarded("system", [&] { return diagonalize_ring(cfg.system); });
  return sp[Level::plus] - sp[Level::minus];
}

std::vector<double> temperatures(const ExperimentConfig& cfg) {
  auto t = cfg.T.values();
  if (cfg.T_in_gap_units) {
    const double g = level_gap(cfg);
    for (double& x : t) x *= g;
  }
  return t;
}

RunOutput run_single(const ExperimentConfig& cfg) {
  RunOutput out{make_table("single"), {}};
  const double T = cfg.T_single;
  const std::string cell = cell_name({{"T", T}});
  guarded(cell, [&] {
    const Model model(cfg.system);
    const double beta = cfg.system.beta(T);
    const auto r = compute_rates(beta, model, cfg.rate_tol);
    const auto M = build_rate_matrix(r);
    const auto rep = classify_regime(M, cfg.lep_eps);
    const auto oc = oscillation_condition(r, beta, model.spectrum);
    const auto res = thermalization_residuals(r, beta, model.spectrum);
    using L = Level;
    out.table.rows.push_back({T, beta, r(L::minus, L::zero), r(L::minus, L::plus),
                              r(L::zero, L::minus), r(L::zero, L::plus), r(L::plus, L::minus),
                              r(L::plus, L::zero), rep.omega_dis, rep.gamma,
                              std::string(to_string(rep.regime)), rep.oscillation_count,
                              rep.im_lambda, cycle_affinity(r), oc.rhs, res[0], res[1], res[2]});
    if (rep.omega_dis == 0.0)
      out.notes.push_back("warning: all transition rates vanish; the populations do not evolve");
    out.notes.push_back("regime = " + std::string(to_string(rep.regime)) +
                        ", gamma/omega^2 = " +
                        format_double(rep.omega_dis > 0 ? rep.gamma / (rep.omega_dis * rep.omega_dis) : 0.0));
    return 0;
  });
  return out;
}

RunOutput run_trajectory(const ExperimentConfig& cfg) {
  RunOutput out{make_table("trajectory"), {}};
  const double T = cfg.T_trajectory;
  guarded(cell_name({{"T", T}}), [&] {
    const Model model(cfg.system);
    const double beta = cfg.system.beta(T);
    const auto M = build_rate_matrix(compute_rates(beta, model, cfg.rate_tol));
    const double ts = slowest_time(M);
    if (!std::isfinite(ts)) throw vdbtherm::InputError("all rates vanish; no dynamics to propagate");
    std::vector<double> times(cfg.t_count);
    for (int i = 0; i < cfg.t_count; ++i) times[i] = cfg.span_slow * ts * i / (cfg.t_count - 1);
    Eigen::VectorXd p0(3);
    p0 << cfg.initial[0], cfg.initial[1], cfg.initial[2];
    const auto traj = propagate(M, p0, times, cfg.lep_tol);
    const Eigen::Vector3d pth = boltzmann(beta, model.spectrum);
    const auto obs = observables(traj, pth, M, index(Level::plus));
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& p = traj.populations[i];
      out.table.rows.push_back({times[i], p(0), p(1), p(2), obs.delta_p_rescaled[i]});
    }
    out.notes.push_back("t_slow = " + format_double(ts));
    out.notes.push_back("propagation path = " + traj.path);
    out.notes.push_back("zero crossings of rescaled dP+ = " +
                        std::to_string(zero_crossings(obs.delta_p_rescaled)));
    return 0;
  });
  return out;
}

RunOutput run_freq_curve(const ExperimentConfig& cfg, int threads) {
  RunOutput out{make_table("freq_curve"), {}};
  const Model model = guarded("system", [&] { return Model(cfg.system); });
  const auto ts = temperatures(cfg);
  auto rows = parallel_map(ts.size(), threads, [&](std::size_t i) {
    const double T = ts[i];
    return guarded(cell_name({{"T", T}}), [&]() -> Row {
      const auto M = build_rate_matrix(compute_rates(cfg.system.beta(T), model, cfg.rate_tol));
      const auto rep = classify_regime(M, cfg.lep_eps);
      return {T, rep.gamma, std::string(to_string(rep.regime)), rep.oscillation_count,
              rep.im_lambda, rep.eigenvalues[1].real(), rep.omega_dis};
    });
  });
  int changes = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if ((std::get<double>(rows[i][1]) > 0) != (std::get<double>(rows[i - 1][1]) > 0)) ++changes;
  out.table.rows = std::move(rows);
  out.notes.push_back("gamma sign changes on grid = " + std::to_string(changes));
  return out;
}

RunOutput run_phase_diagram(const ExperimentConfig& cfg, int threads) {
  RunOutput out{make_table("phase_diagram"), {}};
  const auto v1s = cfg.V1.values();
  const auto ts = temperatures(cfg);
  const std::size_t nt = ts.size();
  auto rows = parallel_map(v1s.size() * nt, threads, [&](std::size_t idx) {
    const double V1 = v1s[idx / nt];
    const double T = ts[idx % nt];
    return guarded(cell_name({{"V1", V1}, {"T", T}}), [&]() -> Row {
      const Model model(with_potentials(cfg.system, V1, std::nullopt, std::nullopt));
      const double beta = cfg.system.beta(T);
      const auto r = compute_rates(beta, model, cfg.rate_tol);
      const auto rep = classify_regime(build_rate_matrix(r), cfg.lep_eps);
      const auto oc = oscillation_condition(r, beta, model.spectrum);
      return {V1, T, rep.gamma, std::string(to_string(rep.regime)), rep.oscillation_count,
              cycle_affinity(r), oc.rhs};
    });
  });
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, std::get<double>(r[4]));
  out.table.rows = std::move(rows);
  out.notes.push_back("max oscillation count = " + format_double(peak));
  return out;
}

RunOutput run_tep_scan(const ExperimentConfig& cfg, int threads) {
  RunOutput out{make_table("tep_scan"), {}};
  const auto v1s = cfg.V1.values();
  TEPOptions opt;
  opt.tol = cfg.tep_tol;
  opt.rate_tol = std::min(cfg.rate_tol, 1e-11);
  opt.eps_rel = cfg.lep_eps;
  auto rows = parallel_map(v1s.size(), threads, [&](std::size_t i) {
    const double V1 = v1s[i];
    return guarded(cell_name({{"V1", V1}}), [&]() -> Row {
      const Model model(with_potentials(cfg.system, V1, std::nullopt, std::nullopt));
      try {
        const auto r = find_T_EP(model, {cfg.tep_T_min, cfg.tep_T_max}, opt);
        return {V1, r.temperature, r.gamma_normalized, static_cast<long long>(r.sign_changes),
                std::string(r.sign_changes > 1 ? "multiple" : "ok")};
      } catch (const NoRootError&) {
        return {V1, kNaN, kNaN, 0LL, std::string("no_root")};
      }
    });
  });
  out.table.rows = std::move(rows);
  return out;
}

RunOutput run_lowT_scan(const ExperimentConfig& cfg, int threads) {
  RunOutput out{make_table("lowT_scan"), {}};
  const Model model = guarded("system", [&] { return Model(cfg.system); });
  const double gap = model.spectrum[Level::plus] - model.spectrum[Level::minus];
  const auto xs = cfg.beta_gap.values();
  auto rows = parallel_map(xs.size(), threads, [&](std::size_t i) {
    const double x = xs[i];
    return guarded(cell_name({{"beta_gap", x}}), [&]() -> Row {
      const double beta = x / gap;
      const auto d = low_T_diagnostics(model, {beta}, cfg.rate_tol).front();
      return {x, beta, cfg.system.temperature(beta), d.up_down_ratios[0], d.up_down_ratios[1],
              d.up_down_ratios[2], d.triangular_distance, static_cast<long long>(d.gamma_sign),
              d.gamma_normalized, d.down_ratio_min, d.down_ratio_max, d.xi_bound_lower,
              d.xi_bound_upper};
    });
  });
  out.table.rows = std::move(rows);
  return out;
}

RunOutput run_bound_scan(const ExperimentConfig& cfg, int threads) {
  RunOutput out{make_table("bound_scan"), {}};
  const auto v2s = cfg.V2.values();
  const auto v3s = cfg.V3.values();
  const std::size_t n3 = v3s.size();
  auto rows = parallel_map(v2s.size() * n3, threads, [&](std::size_t idx) {
    const double V2 = v2s[idx / n3];
    const double V3 = v3s[idx % n3];
    return guarded(cell_name({{"V2", V2}, {"V3", V3}}), [&]() -> Row {
      const Model model(with_potentials(cfg.system, std::nullopt, V2, V3));
      try {
        const auto b = high_T_bound(model, cfg.beta_probe, cfg.rate_tol);
        const double g = normalized_gamma(model, cfg.T_check, cfg.rate_tol);
        return {V2, V3, b.e_vdb, b.gap_term, b.e_low_energy, b.e_low_energy / b.gap_term,
                static_cast<long long>(b.satisfied), b.limit_margin, g, std::string("ok")};
      } catch (const ZeroCouplingError&) {
        return {V2, V3, 0.0, kNaN, kNaN, kNaN, 0LL, kNaN, 0.0, std::string("zero_coupling")};
      }
    });
  });
  out.table.rows = std::move(rows);
  return out;
}

}  // namespace

int resolve_threads(std::optional<int> flag, const ExperimentConfig& cfg) {
  int n = 0;
  if (flag) {
    n = *flag;
  } else if (const char* env = std::getenv("VDBTHERM_THREADS"); env && *env) {
    const std::string s(env);
    auto r = std::from_chars(s.data(), s.data() + s.size(), n);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || n < 0)
      throw ConfigError("VDBTHERM_THREADS", 0, "expected a nonnegative integer, got '" + s + "'");
  } else if (cfg.threads_set) {
    n = cfg.threads;
  }
  if (n < 0) throw ConfigError("--threads", 0, "must be nonnegative");
  if (n == 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return n;
}

RunOutput compute(const ExperimentConfig& cfg, int threads) {
  switch (cfg.mode) {
    case Mode::single: return run_single(cfg);
    case Mode::trajectory: return run_trajectory(cfg);
    case Mode::freq_curve: return run_freq_curve(cfg, threads);
    case Mode::phase_diagram: return run_phase_diagram(cfg, threads);
    case Mode::tep_scan: return run_tep_scan(cfg, threads);
    case Mode::lowT_scan: return run_lowT_scan(cfg, threads);
    case Mode::bound_scan: return run_bound_scan(cfg, threads);
  }
  throw std::logic_error("unhandled mode");
}

std::filesystem::path run(const ExperimentConfig& cfg, int threads, std::vector<std::string>* notes) {
  auto result = compute(cfg, threads);
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / (std::string(to_string(cfg.mode)) + ".csv");
  emit_csv(result.table, cfg.canonical(), path);
  if (notes) *notes = std::move(result.notes);
  return path;
}

}  // namespace vdbtherm::cli
