#include "vdbtherm/scattering.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vdbtherm/errors.hpp"

namespace vdbtherm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cdouble kI{0.0, 1.0};

void require_pair(Level k, Level l) {
  if (k == l) throw InputError("scattering: pair must have distinct levels");
}

double threshold(Level k, Level l, const Model& model) {
  return std::max(model.spectrum[k], model.spectrum[l]);
}

// Bracketed factor of |T~_kl|^2 after removing 2 hbar^2 (E-Ek)(E-El).
double bracket(double E, Level k, Level l, const Model& model) {
  const auto& sp = model.spectrum;
  const auto& v = model.v;
  const double m = model.spec.mass;
  const double hb = model.spec.hbar;
  const double u2 = v.abs_u_sq();
  const cdouble uc = v.u_cyclic;
  const double x2 = std::norm(std::conj(uc) * v.w - uc * uc);
  const double Ep = sp[Level::plus];

  if (E >= Ep) {
    const Level n = third_level(k, l);
    const double dn = E - sp[n];
    const double sign = direction_parity(k, l) == 0 ? 1.0 : -1.0;
    return 2.0 * u2 * hb * hb * dn + m * x2 +
           sign * 2.0 * hb * std::sqrt(2.0 * m) * std::sqrt(dn) * v.im_cycle();
  }
  const double kappa2 = Ep - E;
  return 2.0 * u2 * hb * hb * kappa2 + m * x2 +
         2.0 * hb * std::sqrt(2.0 * m) * std::sqrt(kappa2) * (u2 * v.w - v.re_cycle());
}

void check_band(double E, Level k, Level l, const Model& model, const char* who) {
  require_pair(k, l);
  const double lo = threshold(k, l, model);
  if (!(E >= lo)) {
    std::ostringstream os;
    os << who << ": E=" << E << " below threshold " << lo << " of pair (" << to_string(k)
       << "," << to_string(l) << ")";
    throw BranchError(os.str());
  }
}

double denominator_norm(double E, const Model& model) {
  const cdouble d = t_denominator(E, model);
  const double a = std::abs(d);
  if (!(a >= kPoleFloor)) {
    std::ostringstream os;
    os << "|D_T| = " << a << " at E=" << E << " falls below the pole floor";
    throw PoleOnContourError(os.str(), E);
  }
  return a * a;
}

}  // namespace

int direction_parity(Level k, Level l) {
  require_pair(k, l);
  // Clockwise (k,l): l -> k follows - -> 0 -> + -> -.
  return ((index(k) - index(l) + 3) % 3) == 1 ? 0 : 1;
}

cdouble channel_root(double E, double Ej) {
  const double d = E - Ej;
  return d >= 0.0 ? cdouble{std::sqrt(d), 0.0} : cdouble{0.0, std::sqrt(-d)};
}

cdouble t_denominator(double E, const Model& model) {
  const auto& sp = model.spectrum;
  if (!(E >= sp[Level::zero])) {
    std::ostringstream os;
    os << "t_denominator: E=" << E << " below E0=" << sp[Level::zero];
    throw BranchError(os.str());
  }
  const double m = model.spec.mass;
  const double hb = model.spec.hbar;
  const double w = model.v.w;
  const double u2 = model.v.abs_u_sq();
  const double re3 = model.v.re_cycle();
  const cdouble a = channel_root(E, sp[Level::minus]);
  const cdouble b = channel_root(E, sp[Level::zero]);
  const cdouble c = channel_root(E, sp[Level::plus]);
  const double s2m = std::sqrt(2.0 * m);
  return kI * kPi * m * s2m * (-2.0 * re3 + 3.0 * u2 * w - w * w * w) +
         2.0 * kPi * m * hb * (u2 - w * w) * (a + b + c) +
         2.0 * kI * kPi * hb * hb * s2m * w * (a * b + a * c + b * c) +
         4.0 * kPi * hb * hb * hb * a * b * c;
}

cdouble t_tilde(double E, Level k, Level l, const Model& model) {
  check_band(E, k, l, model, "t_tilde");
  const auto& sp = model.spectrum;
  const double m = model.spec.mass;
  const double hb = model.spec.hbar;
  const double w = model.v.w;
  const Level n = third_level(k, l);
  const cdouble sk = channel_root(E, sp[k]);
  const cdouble sl = channel_root(E, sp[l]);
  const cdouble sn = channel_root(E, sp[n]);
  const cdouble uc = model.v.u_cyclic;
  const cdouble a = direction_parity(k, l) == 0 ? std::conj(uc) : uc;
  const cdouble x = a * w - std::conj(a) * std::conj(a);
  return std::sqrt(2.0) * hb * sk * sl *
         (a * std::sqrt(2.0) * hb * sn + kI * std::sqrt(m) * x);
}

double t_element_sq(double E, Level k, Level l, const Model& model) {
  check_band(E, k, l, model, "t_element_sq");
  const auto& sp = model.spectrum;
  const double hb = model.spec.hbar;
  const double num =
      2.0 * hb * hb * (E - sp[k]) * (E - sp[l]) * bracket(E, k, l, model);
  return std::max(0.0, num / denominator_norm(E, model));
}

TMatrixEvaluation evaluate_t(double E, Level k, Level l, const Model& model) {
  return {E, k, l, t_element_sq(E, k, l, model), direction_parity(k, l)};
}

double rate_kernel(double E, Level k, Level l, const Model& model) {
  check_band(E, k, l, model, "rate_kernel");
  const auto& sp = model.spectrum;
  const double hb = model.spec.hbar;
  const double num = 2.0 * hb * hb * std::sqrt(E - sp[k]) * std::sqrt(E - sp[l]) *
                     bracket(E, k, l, model);
  return std::max(0.0, num / denominator_norm(E, model));
}

DefectEvaluation microreversibility_defect(double E, Level k, Level l, const Model& model) {
  require_pair(k, l);
  const auto& sp = model.spectrum;
  if (!(E > sp[Level::plus]))
    throw BranchError("microreversibility_defect: defined only above E+");
  DefectEvaluation out;
  out.direct = t_element_sq(E, k, l, model) - t_element_sq(E, l, k, model);
  const double m = model.spec.mass;
  const double hb = model.spec.hbar;
  const Level n = third_level(k, l);
  const double sign = direction_parity(k, l) == 0 ? 1.0 : -1.0;
  const double h2 = 2.0 * hb;
  out.closed_form = sign * h2 * h2 * h2 * std::sqrt(2.0 * m) * (E - sp[k]) * (E - sp[l]) *
                    std::sqrt(E - sp[n]) * model.v.im_cycle() / denominator_norm(E, model);
  return out;
}

}  // namespace vdbtherm
