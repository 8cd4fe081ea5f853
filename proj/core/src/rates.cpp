#include "vdbtherm/rates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vdbtherm/errors.hpp"
#include "vdbtherm/quadrature.hpp"
#include "vdbtherm/scattering.hpp"

namespace vdbtherm {

namespace {

constexpr double kPi = std::numbers::pi;
// Gaussian tail cut: e^{-45} is below double relevance.
constexpr double kTailCut = 45.0;

// 4 pi m nu / sqrt(2 pi m); the rate prefactor is this times sqrt(beta).
double reduced_prefactor(const SystemSpec& s) {
  return 4.0 * kPi * s.mass * s.gas_density / std::sqrt(2.0 * kPi * s.mass);
}

quad::Options options(double tol) {
  quad::Options o;
  o.rel_tol = tol;
  o.max_intervals = 4000;
  return o;
}

// Integral over [E+, inf) of e^{-beta(E-E+)} f(E) dE with E = E+ + y^2/beta.
template <class F>
quad::Result upper_band(F&& f, double beta, double Ep, double tol) {
  auto g = [&](double y) {
    const double E = Ep + y * y / beta;
    return std::exp(-y * y) * f(E) * 2.0 * y / beta;
  };
  return quad::integrate(g, 0.0, std::sqrt(kTailCut), options(tol));
}

// Integral over [E0, E+] of e^{-beta(E-E0)} f(E) dE with E = E0 + (E+-E0) sin^2(theta).
template <class F>
quad::Result lower_band(F&& f, double beta, double E0, double Ep, double tol) {
  const double gap = Ep - E0;
  auto g = [&](double th) {
    const double s = std::sin(th), c = std::cos(th);
    const double x = gap * s * s;
    return std::exp(-beta * x) * f(E0 + x) * 2.0 * gap * s * c;
  };
  return quad::integrate(g, 0.0, kPi / 2.0, options(tol));
}

[[noreturn]] void fail(const char* what, Level k, Level l, double beta, double est,
                       double err) {
  std::ostringstream os;
  os << what << " did not converge for pair (" << to_string(k) << "," << to_string(l)
     << ") at beta=" << beta << " (estimate " << est << ", error " << err << ")";
  throw QuadratureError(os.str(), est, err);
}

}  // namespace

void check_beta(double beta) {
  if (!(beta >= kMinBeta && beta <= kMaxBeta)) {
    std::ostringstream os;
    os << "beta=" << beta << " outside supported range [" << kMinBeta << ", " << kMaxBeta
       << "]";
    throw RangeError(os.str());
  }
}

double RateSet::omega_dis() const {
  double s = 0.0;
  for (auto [k, l] : kPairs) s += (*this)(k, l);
  return s;
}

RateSet RateSet::scaled(double s) const {
  RateSet out = *this;
  for (auto& row : out.rates)
    for (double& x : row) x *= s;
  for (auto& row : out.abs_error)
    for (double& x : row) x *= std::abs(s);
  return out;
}

RateValue transition_rate(Level k, Level l, double beta, const Model& model, double tol) {
  if (k == l) throw InputError("transition_rate: levels must differ");
  check_beta(beta);
  const auto& sp = model.spectrum;
  const double Ep = sp[Level::plus];
  const double E0 = sp[Level::zero];
  const double El = sp[l];
  const double pref = reduced_prefactor(model.spec) * std::sqrt(beta);

  auto kernel = [&](double E) { return rate_kernel(E, k, l, model); };

  const auto up = upper_band(kernel, beta, Ep, tol);
  const double wu = pref * std::exp(-beta * (Ep - El));
  RateValue out{wu * up.value, wu * up.abs_error};
  bool ok = up.converged;

  if (k != Level::plus && l != Level::plus) {
    const auto lo = lower_band(kernel, beta, E0, Ep, tol);
    const double wl = pref * std::exp(-beta * (E0 - El));
    out.value += wl * lo.value;
    out.abs_error += wl * lo.abs_error;
    ok = ok && lo.converged;
  }
  if (!ok) fail("rate quadrature", k, l, beta, out.value, out.abs_error);
  return out;
}

RateSet compute_rates(double beta, const Model& model, double tol) {
  RateSet r;
  r.beta = beta;
  for (auto [k, l] : kPairs) {
    const auto v = transition_rate(k, l, beta, model, tol);
    r(k, l) = v.value;
    r.abs_error[index(k)][index(l)] = v.abs_error;
  }
  return r;
}

double cycle_affinity(const RateSet& r) {
  using L = Level;
  return r(L::minus, L::plus) * r(L::plus, L::zero) * r(L::zero, L::minus) -
         r(L::minus, L::zero) * r(L::zero, L::plus) * r(L::plus, L::minus);
}

double RateDecomposition::reassemble(Level k, Level l, const Spectrum& spectrum) const {
  const Level n = third_level(k, l);
  const double El = spectrum[l];
  const double sign = ((index(k) - index(l) + 3) % 3) == 1 ? 1.0 : -1.0;
  const double sb = std::sqrt(beta);
  double a = sb * std::exp(-beta * (E_plus - El)) * (A0 + sign * A1 + B[index(n)]);
  if (n == Level::plus) a += sb * std::exp(-beta * (E_zero - El)) * B_tilde_plus;
  return a;
}

RateDecomposition rate_decomposition(double beta, const Model& model, double tol) {
  check_beta(beta);
  const auto& sp = model.spectrum;
  const auto& v = model.v;
  const double m = model.spec.mass;
  const double hb = model.spec.hbar;
  const double C = reduced_prefactor(model.spec);
  const double u2 = v.abs_u_sq();
  const double x2 = std::norm(std::conj(v.u_cyclic) * v.w - v.u_cyclic * v.u_cyclic);
  const double Ep = sp[Level::plus];
  const double E0 = sp[Level::zero];

  auto dn = [&](double E) {
    const double a = std::abs(t_denominator(E, model));
    if (!(a >= kPoleFloor)) throw PoleOnContourError("pole on decomposition contour", E);
    return a * a;
  };
  auto root = [&](double E, Level j) { return std::sqrt(E - sp[j]); };
  // F(E) = C 2 hbar^2 sqrt((E-E+)(E-E0)(E-E-)) / |D_T|^2
  auto F = [&](double E) {
    return C * 2.0 * hb * hb * root(E, Level::minus) * root(E, Level::zero) *
           root(E, Level::plus) / dn(E);
  };

  RateDecomposition d;
  d.beta = beta;
  d.E_plus = Ep;
  d.E_zero = E0;

  bool ok = true;
  auto run = [&](auto&& f) {
    const auto r = upper_band(f, beta, Ep, tol);
    ok = ok && r.converged;
    return r.value;
  };

  d.A0 = run([&](double E) {
    const double se = std::sqrt(E);
    return F(E) * (2.0 * u2 * hb * hb * se + m * x2 / se);
  });
  d.A1 = run([&](double E) { return F(E) * 2.0 * std::sqrt(2.0 * m) * hb * v.im_cycle(); });
  for (Level n : kLevels) {
    d.B[index(n)] = run([&](double E) {
      double others = C * 2.0 * hb * hb / dn(E);
      for (Level j : kLevels)
        if (j != n) others *= root(E, j);
      const double rn = root(E, n);
      const double se = std::sqrt(E);
      const double En = sp[n];
      // sqrt(E-En) - sqrt(E) and 1 - sqrt(E-En)/sqrt(E), written without cancellation.
      const double diff = -En / (rn + se);
      const double ratio = En / (se * (se + rn));
      return others * (2.0 * u2 * hb * hb * rn * diff + m * x2 * ratio);
    });
  }
  {
    auto btilde = [&](double E) {
      return C * rate_kernel(E, Level::minus, Level::zero, model);
    };
    const auto r = lower_band(btilde, beta, E0, Ep, tol);
    ok = ok && r.converged;
    d.B_tilde_plus = r.value;
  }
  if (!ok) throw QuadratureError("rate decomposition quadrature did not converge", d.A0, 0.0);

  const double sb = std::sqrt(beta);
  const double up = sb * std::exp(-beta * Ep);
  d.a_tilde_1 = up * d.A1;
  for (Level n : kLevels) {
    d.a_tilde[index(n)] = up * (d.A0 + d.B[index(n)]);
    if (n == Level::plus) d.a_tilde[index(n)] += sb * std::exp(-beta * E0) * d.B_tilde_plus;
  }
  const auto& t = d.a_tilde;
  d.c0 = t[0] * t[1] + t[0] * t[2] + t[1] * t[2];
  d.c = d.cycle_identity();

  const RateSet direct = compute_rates(beta, model, tol);
  for (auto [k, l] : kPairs) {
    const double a = direct(k, l);
    const double b = d.reassemble(k, l, sp);
    const double scale = std::max(std::abs(a), 1e-300);
    if (a != b) d.max_reassembly_error = std::max(d.max_reassembly_error, std::abs(a - b) / scale);
  }
  return d;
}

}  // namespace vdbtherm
