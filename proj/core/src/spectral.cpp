#include "vdbtherm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "vdbtherm/errors.hpp"
#include "vdbtherm/quadrature.hpp"
#include "vdbtherm/scattering.hpp"

namespace vdbtherm {

namespace {

constexpr double kPi = std::numbers::pi;

// a * e^x without overflow when a is tiny and x large.
double scaled_exp(double a, double x) {
  if (a == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(a)) + x), a);
}

using L = Level;

}  // namespace

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::exponential:
      return "exponential";
    case Regime::lep:
      return "lep";
    case Regime::oscillatory:
      return "oscillatory";
  }
  return "?";
}

double RateMatrix::omega_dis() const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    for (Eigen::Index l = 0; l < m.cols(); ++l)
      if (k != l) s += m(k, l);
  return s;
}

RateMatrix RateMatrix::from_offdiagonal(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("rate matrix must be square");
  RateMatrix out{a};
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index k = 0; k < a.rows(); ++k)
      if (k != j) col += a(k, j);
    out.m(j, j) = -col;
  }
  return out;
}

RateMatrix build_rate_matrix(const RateSet& rates) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  for (auto [k, l] : kPairs) a(index(k), index(l)) = rates(k, l);
  return RateMatrix::from_offdiagonal(a);
}

double discriminant_gamma(const RateMatrix& M) {
  if (M.size() != 3) throw DimensionError("discriminant_gamma requires a 3 x 3 generator");
  const auto& m = M.m;
  const double w = M.omega_dis();
  // Principal 2x2 minors expanded into nine nonnegative products.
  double sigma = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const int k = 3 - i - j;
      sigma += m(j, i) * m(k, j) + m(k, i) * m(i, j) + m(k, i) * m(k, j);
    }
  }
  return w * w - 4.0 * sigma;
}

RegimeReport classify_regime(const RateMatrix& M, double eps_rel) {
  RegimeReport r;
  r.omega_dis = M.omega_dis();
  r.gamma = discriminant_gamma(M);
  const double w = r.omega_dis;
  const double band = eps_rel * w * w;
  if (r.gamma >= 0.0) {
    const double s = std::sqrt(r.gamma);
    r.eigenvalues = {cdouble{0.0}, cdouble{-0.5 * w + 0.5 * s}, cdouble{-0.5 * w - 0.5 * s}};
  } else {
    const double s = std::sqrt(-r.gamma);
    r.eigenvalues = {cdouble{0.0}, cdouble{-0.5 * w, 0.5 * s}, cdouble{-0.5 * w, -0.5 * s}};
  }
  if (w == 0.0) {
    r.regime = Regime::exponential;  // no dynamics at all
  } else if (r.gamma < -band) {
    r.regime = Regime::oscillatory;
    r.im_lambda = 0.5 * std::sqrt(-r.gamma);
    r.oscillation_count = std::sqrt(-r.gamma) / w;
  } else if (r.gamma > band) {
    r.regime = Regime::exponential;
  } else {
    r.regime = Regime::lep;
  }
  return r;
}

Eigen::Vector3d boltzmann(double beta, const Spectrum& spectrum) {
  const double e0 = spectrum[L::minus];
  Eigen::Vector3d p;
  for (Level k : kLevels) p(index(k)) = std::exp(-beta * (spectrum[k] - e0));
  return p / p.sum();
}

std::array<double, 3> thermalization_residuals(const RateSet& rates, double beta,
                                               const Spectrum& spectrum) {
  std::array<double, 3> out{};
  const double w = rates.omega_dis();
  if (w == 0.0) return out;
  for (Level i : kLevels) {
    double s = 0.0;
    for (Level j : kLevels) {
      if (j == i) continue;
      s += scaled_exp(rates(i, j), -beta * (spectrum[j] - spectrum[i])) - rates(j, i);
    }
    out[index(i)] = s / w;
  }
  return out;
}

double stationarity_residual(const RateSet& rates, double beta, const Spectrum& spectrum) {
  const auto M = build_rate_matrix(rates);
  const Eigen::Vector3d p = boltzmann(beta, spectrum);
  const double w = M.omega_dis();
  if (w == 0.0) return 0.0;
  return (M.m * p).cwiseAbs().maxCoeff() / (w * p.maxCoeff());
}

OscillationCondition oscillation_condition(const RateSet& rates, double beta,
                                           const Spectrum& spectrum) {
  OscillationCondition out;
  out.lhs = std::abs(cycle_affinity(rates));
  const double em = spectrum[L::minus], ez = spectrum[L::zero], ep = spectrum[L::plus];
  const double shift = beta * (ep - em);
  // Everything below is multiplied by e^{-shift}.
  double sum = 0.0;
  for (Level k : kLevels)
    for (Level l : kLevels) sum += std::exp(beta * (spectrum[k] - spectrum[l]) - shift);
  const double wdb = scaled_exp(rates(L::minus, L::plus), beta * (em - ep) - shift) +
                     scaled_exp(rates(L::minus, L::plus), -shift) +
                     scaled_exp(rates(L::zero, L::minus), beta * (ez - em) - shift) +
                     scaled_exp(rates(L::zero, L::minus), -shift) +
                     scaled_exp(rates(L::plus, L::zero), -shift) +
                     scaled_exp(rates(L::plus, L::zero), beta * (ep - ez) - shift);
  const double w = rates.omega_dis();
  const double wdis = scaled_exp(w, -shift);
  out.rhs = w * w * std::abs(wdb - wdis) / (4.0 * sum);
  out.holds = out.lhs > out.rhs;
  return out;
}

HighTBoundReport high_T_bound(const Model& model, double beta_probe, double tol) {
  check_beta(beta_probe);
  const auto& sp = model.spectrum;
  const auto& v = model.v;
  const double m = model.spec.mass;
  const double hb = model.spec.hbar;
  const double u2 = v.abs_u_sq();
  if (!(u2 > 0.0)) throw ZeroCouplingError("high_T_bound: off-diagonal coupling u vanishes");
  const double x2 = std::norm(std::conj(v.u_cyclic) * v.w - v.u_cyclic * v.u_cyclic);
  const double C = 4.0 * kPi * m * model.spec.gas_density / std::sqrt(2.0 * kPi * m);
  const double Em = sp[L::minus], Ez = sp[L::zero], Ep = sp[L::plus];

  auto dn = [&](double E) {
    const double a = std::abs(t_denominator(E, model));
    if (!(a >= kPoleFloor)) throw PoleOnContourError("pole on high-T contour", E);
    return a * a;
  };
  auto root = [&](double E, Level j) { return std::sqrt(E - sp[j]); };
  auto F = [&](double E) {
    return C * 2.0 * hb * hb * root(E, L::minus) * root(E, L::zero) * root(E, L::plus) / dn(E);
  };

  quad::Options opt;
  opt.rel_tol = tol;
  opt.max_intervals = 4000;
  bool ok = true;
  // Integral over [E+, inf) at beta = 0, E = E+ + s^2.
  auto semi = [&](auto&& f) {
    auto g = [&](double s) { return f(Ep + s * s) * 2.0 * s; };
    const auto r = quad::integrate_to_infinity(g, 0.0, opt);
    ok = ok && r.converged;
    return r.value;
  };

  const double A1_hat = semi([&](double E) { return F(E) * 2.0 * std::sqrt(2.0 * m) * hb; });
  std::array<double, 3> B{};
  for (Level n : kLevels) {
    B[index(n)] = semi([&](double E) {
      double others = C * 2.0 * hb * hb / dn(E);
      for (Level j : kLevels)
        if (j != n) others *= root(E, j);
      const double rn = root(E, n);
      const double se = std::sqrt(E);
      const double En = sp[n];
      return others * (2.0 * u2 * hb * hb * rn * (-En / (rn + se)) +
                       m * x2 * En / (se * (se + rn)));
    });
  }
  const double g = semi([&](double E) { return F(E) * u2 * hb * hb / std::sqrt(E); });
  double Bt = 0.0;
  {
    const double gap = Ep - Ez;
    auto h = [&](double th) {
      const double s = std::sin(th), c = std::cos(th);
      return C * rate_kernel(Ez + gap * s * s, L::minus, L::zero, model) * 2.0 * gap * s * c;
    };
    const auto r = quad::integrate(h, 0.0, kPi / 2.0, opt);
    ok = ok && r.converged;
    Bt = r.value;
  }
  if (!ok) throw QuadratureError("high_T_bound quadrature did not converge", Bt, 0.0);

  auto Bx = [&](Level n) { return B[index(n)]; };
  auto dBp = [&](Level i, Level j) {
    const double de = sp[j] - sp[i];
    return Bx(i) - Bx(j) + u2 * hb * de * A1_hat / (2.0 * std::sqrt(2.0 * m * Ep)) - de * g;
  };
  const double tilde_term = Bt * (Bt + (Bx(L::plus) - Bx(L::zero)) + (Bx(L::plus) - Bx(L::minus)));
  const double Q = std::pow(dBp(L::minus, L::zero), 2) +
                   dBp(L::minus, L::plus) * dBp(L::zero, L::plus) + tilde_term;

  HighTBoundReport rep;
  rep.e_vdb = vdb_energy_scale(model.spec, v);
  rep.gap_term = ((Em - Ez) * (Em - Ez) + (Em - Ep) * (Ez - Ep)) / Ep;
  const double ratio = 8.0 * m / (hb * hb * u2 * u2 * A1_hat * A1_hat);  // E_VDB / (3 A1^2)
  rep.e_low_energy = ratio * Q - rep.gap_term;
  rep.satisfied = rep.e_vdb > rep.gap_term + rep.e_low_energy;

  const double A1 = v.im_cycle() * A1_hat;
  auto margin = [](double a1, double bm, double bz, double bp, double bt) {
    return -3.0 * a1 * a1 + (bm - bz) * (bm - bz) + (bm - bp) * (bz - bp) +
           bt * (bt + (bp - bz) + (bp - bm));
  };
  rep.limit_margin = margin(A1, Bx(L::minus), Bx(L::zero), Bx(L::plus), Bt);

  const auto d = rate_decomposition(beta_probe, model, tol);
  const double up = std::exp(-beta_probe * Ep);
  rep.probe_margin = margin(up * d.A1, up * d.B[0], up * d.B[1], up * d.B[2],
                            std::exp(-beta_probe * Ez) * d.B_tilde_plus);
  return rep;
}

double normalized_gamma(const Model& model, double temperature, double rate_tol) {
  const double beta = model.spec.beta(temperature);
  const auto M = build_rate_matrix(compute_rates(beta, model, rate_tol));
  const double w = M.omega_dis();
  if (w == 0.0) return 0.0;
  return discriminant_gamma(M) / (w * w);
}

TEPResult find_T_EP(const Model& model, std::pair<double, double> t_bracket,
                    const TEPOptions& opt) {
  auto [lo, hi] = t_bracket;
  if (!(lo > 0.0 && hi > lo)) throw InputError("find_T_EP: bracket must satisfy 0 < lo < hi");
  auto gfun = [&](double T) { return normalized_gamma(model, T, opt.rate_tol); };

  const int n = std::max(2, opt.prescan_points);
  std::vector<double> ts(n), gs(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    gs[i] = gfun(ts[i]);
  }
  TEPResult res;
  int first = -1;
  for (int i = 0; i + 1 < n; ++i) {
    if ((gs[i] > 0.0) != (gs[i + 1] > 0.0)) {
      ++res.sign_changes;
      if (first < 0) first = i;
    }
  }
  if (first < 0) {
    std::ostringstream os;
    os << "find_T_EP: gamma does not change sign on [" << lo << ", " << hi << "]";
    throw NoRootError(os.str());
  }
  if (res.sign_changes > 1) {
    std::ostringstream os;
    os << "find_T_EP: " << res.sign_changes << " sign changes on bracket; returning the lowest";
    res.warnings.push_back(os.str());
  }

  double a = ts[first], b = ts[first + 1];
  double ga = gs[first], gb = gs[first + 1];
  while ((b - a) / a > opt.tol) {
    const double c = std::sqrt(a * b);
    const double gc = gfun(c);
    if ((gc > 0.0) == (ga > 0.0)) {
      a = c;
      ga = gc;
    } else {
      b = c;
      gb = gc;
    }
  }
  res.bracket = {a, b};

  // Illinois steps inside the final bracket to pull gamma into the LEP band.
  double x = std::abs(ga) < std::abs(gb) ? a : b;
  double gx = std::abs(ga) < std::abs(gb) ? ga : gb;
  int side = 0;
  for (int it = 0; it < 60 && std::abs(gx) > 0.1 * opt.eps_rel; ++it) {
    const double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > a && c < b)) break;
    const double gc = gfun(c);
    x = c;
    gx = gc;
    if ((gc > 0.0) == (ga > 0.0)) {
      a = c;
      ga = gc;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = c;
      gb = gc;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }
  res.temperature = x;
  res.gamma_normalized = gx;
  return res;
}

double eigenvector_angle(const RateMatrix& M) {
  if (M.size() != 3) throw DimensionError("eigenvector_angle requires a 3 x 3 generator");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M.m);
  const Eigen::VectorXcd ev = es.eigenvalues();
  int zero = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(ev(i)) < std::abs(ev(zero))) zero = i;
  std::array<int, 2> idx{};
  int c = 0;
  for (int i = 0; i < 3; ++i)
    if (i != zero) idx[c++] = i;
  const Eigen::VectorXcd v1 = es.eigenvectors().col(idx[0]);
  const Eigen::VectorXcd v2 = es.eigenvectors().col(idx[1]);
  const cdouble proj = v1.dot(v2) / v1.squaredNorm();
  const double perp = (v2 - proj * v1).norm();
  const double par = std::abs(proj) * v1.norm();
  return std::atan2(perp, par);
}

DownRateBounds down_rate_bounds(const Model& model, double e_cut, int samples) {
  const auto& sp = model.spectrum;
  if (!(e_cut > sp[L::plus])) throw InputError("down_rate_bounds: cut must exceed E+");
  const double scale = sp[L::plus] - sp[L::minus];
  DownRateBounds out;
  out.e_cut = e_cut;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = 0.0;
  for (auto [k, l] : kPairs) {
    const double thr = std::max(sp[k], sp[l]);
    auto f = [&](double x) { return rate_kernel(thr + x, k, l, model) / std::sqrt(x); };
    // Geometric grid in x = E - threshold, out to far beyond the cut.
    const double x0 = 1e-10 * scale, x1 = 1e6 * scale;
    for (int i = 0; i <= samples; ++i) {
      const double x = x0 * std::pow(x1 / x0, static_cast<double>(i) / samples);
      const double y = f(x);
      out.upper = std::max(out.upper, y);
      if (thr + x <= e_cut) out.lower = std::min(out.lower, y);
    }
    const double y = f(e_cut - thr);
    out.lower = std::min(out.lower, y);
  }
  return out;
}

std::vector<LowTRow> low_T_diagnostics(const Model& model, const std::vector<double>& betas,
                                       double tol) {
  if (!std::is_sorted(betas.begin(), betas.end()))
    throw InputError("low_T_diagnostics: beta list must be ascending");
  const auto& sp = model.spectrum;
  const double e_cut = 2.0 * sp[L::plus] - sp[L::minus];
  const auto bounds = down_rate_bounds(model, e_cut);
  constexpr std::array<std::pair<Level, Level>, 3> up{{
      {L::zero, L::minus}, {L::plus, L::minus}, {L::plus, L::zero}}};
  constexpr std::array<std::pair<Level, Level>, 3> down{{
      {L::minus, L::zero}, {L::minus, L::plus}, {L::zero, L::plus}}};

  std::vector<LowTRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    const auto r = compute_rates(beta, model, tol);
    const auto M = build_rate_matrix(r);
    LowTRow row;
    row.beta = beta;
    for (int i = 0; i < 3; ++i) {
      const auto [k, l] = up[i];
      row.up_down_ratios[i] = r(l, k) > 0.0 ? r(k, l) / r(l, k) : 0.0;
    }
    const double w = M.omega_dis();
    row.normalized = w > 0.0 ? Eigen::Matrix3d(M.m / w) : Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < k; ++l)
        row.triangular_distance = std::max(row.triangular_distance, std::abs(row.normalized(k, l)));
    const double g = discriminant_gamma(M);
    row.gamma_normalized = w > 0.0 ? g / (w * w) : 0.0;
    row.gamma_sign = (g > 0.0) - (g < 0.0);

    row.down_ratio_min = std::numeric_limits<double>::infinity();
    row.down_ratio_max = 0.0;
    double xi_min = std::numeric_limits<double>::infinity();
    for (auto [k, l] : down) {
      const double a = beta * (e_cut - std::max(sp[k], sp[l]));
      const double xi = bounds.lower / bounds.upper *
                        (std::sqrt(kPi) * std::erf(std::sqrt(a)) - 2.0 * std::sqrt(a) * std::exp(-a)) /
                        std::sqrt(kPi);
      xi_min = std::min(xi_min, xi);
      for (auto [i, j] : down) {
        if (i == k && j == l) continue;
        const double q = r(k, l) / r(i, j);
        row.down_ratio_min = std::min(row.down_ratio_min, q);
        row.down_ratio_max = std::max(row.down_ratio_max, q);
      }
    }
    row.xi_bound_lower = xi_min;
    row.xi_bound_upper = 1.0 / xi_min;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vdbtherm
