#pragma once

#include <array>
#include <utility>

#include "vdbtherm/model.hpp"

namespace vdbtherm {

inline constexpr double kDefaultRateTol = 1e-9;
inline constexpr double kMinBeta = 1e-6;
inline constexpr double kMaxBeta = 1e6;

/// Ordered pairs (k, l) in output order: -0, -+, 0-, 0+, +-, +0.
constexpr std::array<std::pair<Level, Level>, 6> kPairs{{
    {Level::minus, Level::zero},
    {Level::minus, Level::plus},
    {Level::zero, Level::minus},
    {Level::zero, Level::plus},
    {Level::plus, Level::minus},
    {Level::plus, Level::zero},
}};

/// Thermal rates a_kl (transition l -> k).
struct RateSet {
  std::array<std::array<double, 3>, 3> rates{};
  std::array<std::array<double, 3>, 3> abs_error{};
  double beta = 1.0;

  double operator()(Level k, Level l) const { return rates[index(k)][index(l)]; }
  double& operator()(Level k, Level l) { return rates[index(k)][index(l)]; }
  double omega_dis() const;
  RateSet scaled(double s) const;
};

struct RateValue {
  double value = 0.0;
  double abs_error = 0.0;
};

/// a_kl at inverse temperature beta, relative accuracy tol.
RateValue transition_rate(Level k, Level l, double beta, const Model& model,
                          double tol = kDefaultRateTol);

RateSet compute_rates(double beta, const Model& model, double tol = kDefaultRateTol);

/// a_{-+} a_{+0} a_{0-} - a_{-0} a_{0+} a_{+-}.
double cycle_affinity(const RateSet& r);

/// Temperature-independent split of the rates.  Integrals over [E+, inf) are
/// stored multiplied by e^{beta E+}; the low-band integral by e^{beta E0}.
struct RateDecomposition {
  double beta = 1.0;
  double A0 = 0.0;
  double A1 = 0.0;
  std::array<double, 3> B{};   // indexed by the uninvolved level
  double B_tilde_plus = 0.0;
  double E_plus = 0.0;
  double E_zero = 0.0;

  // Unscaled sqrt(beta) * integral quantities entering the cycle identity.
  double a_tilde_1 = 0.0;
  std::array<double, 3> a_tilde{};  // symmetric part by uninvolved level
  double c = 0.0;
  double c0 = 0.0;

  double max_reassembly_error = 0.0;  // vs. direct quadrature, relative

  /// a_kl rebuilt from the pieces.
  double reassemble(Level k, Level l, const Spectrum& spectrum) const;
  /// 2 a~1 (a~1^2 + c0).
  double cycle_identity() const { return 2.0 * a_tilde_1 * (a_tilde_1 * a_tilde_1 + c0); }
};

RateDecomposition rate_decomposition(double beta, const Model& model,
                                     double tol = kDefaultRateTol);

/// Checks beta against [kMinBeta, kMaxBeta]; throws RangeError.
void check_beta(double beta);

}  // namespace vdbtherm
