#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vdbtherm/model.hpp"
#include "vdbtherm/rates.hpp"

namespace vdbtherm {

/// Pauli generator: M_kl = a_kl off the diagonal, zero column sums.
struct RateMatrix {
  Eigen::MatrixXd m;

  Eigen::Index size() const { return m.rows(); }
  double omega_dis() const;
  /// Builds an N x N generator from off-diagonal rates; the diagonal is overwritten.
  static RateMatrix from_offdiagonal(const Eigen::MatrixXd& a);
};

enum class Regime { exponential, lep, oscillatory };

const char* to_string(Regime r) noexcept;

inline constexpr double kDefaultLepEps = 1e-8;

struct RegimeReport {
  double omega_dis = 0.0;
  double gamma = 0.0;
  std::array<cdouble, 3> eigenvalues{};  // 0, lambda+, lambda-
  Regime regime = Regime::exponential;
  double oscillation_count = 0.0;        // |Im lambda / Re lambda|
  double im_lambda = 0.0;                // |Im lambda|
};

struct OscillationCondition {
  double lhs = 0.0;  // |c|
  double rhs = 0.0;
  bool holds = false;
};

struct HighTBoundReport {
  double e_vdb = 0.0;
  double gap_term = 0.0;
  double e_low_energy = 0.0;
  bool satisfied = false;
  double limit_margin = 0.0;  // -3A1^2 + (B- - B0)^2 + ... at beta -> 0; < 0 means oscillatory
  double probe_margin = 0.0;  // same combination at beta_probe
};

struct TEPResult {
  double temperature = 0.0;
  double gamma_normalized = 0.0;  // gamma / omega_dis^2 at the root
  std::pair<double, double> bracket{};
  int sign_changes = 0;
  std::vector<std::string> warnings;
};

struct TEPOptions {
  double tol = 1e-6;            // relative bracket width
  double rate_tol = 1e-11;
  double eps_rel = kDefaultLepEps;
  int prescan_points = 32;
};

struct DownRateBounds {
  double lower = 0.0;  // B^L(E_cut)
  double upper = 0.0;  // B^U
  double e_cut = 0.0;
};

struct LowTRow {
  double beta = 0.0;
  std::array<double, 3> up_down_ratios{};  // a_0-/a_-0, a_+-/a_-+, a_+0/a_0+
  Eigen::Matrix3d normalized;               // M / omega_dis
  double triangular_distance = 0.0;         // max |M~_kl|, k above l in energy
  int gamma_sign = 0;
  double gamma_normalized = 0.0;
  double down_ratio_min = 0.0;              // over ordered pairs of down rates
  double down_ratio_max = 0.0;
  double xi_bound_lower = 0.0;              // finite-beta bracket on those ratios
  double xi_bound_upper = 0.0;
};

RateMatrix build_rate_matrix(const RateSet& rates);

/// gamma = omega^2 - 4 (sum of principal 2x2 minors).  N must be 3.
double discriminant_gamma(const RateMatrix& M);

RegimeReport classify_regime(const RateMatrix& M, double eps_rel = kDefaultLepEps);

/// Boltzmann populations ordered (-, 0, +).
Eigen::Vector3d boltzmann(double beta, const Spectrum& spectrum);

/// (M P_th)_i / (P_th,i omega_dis) for each level.
std::array<double, 3> thermalization_residuals(const RateSet& rates, double beta,
                                               const Spectrum& spectrum);

/// max_i |M P_th|_i / (omega_dis max_i P_th,i).
double stationarity_residual(const RateSet& rates, double beta, const Spectrum& spectrum);

OscillationCondition oscillation_condition(const RateSet& rates, double beta,
                                           const Spectrum& spectrum);

HighTBoundReport high_T_bound(const Model& model, double beta_probe,
                              double tol = kDefaultRateTol);

/// gamma / omega_dis^2 at temperature T.
double normalized_gamma(const Model& model, double temperature, double rate_tol);

TEPResult find_T_EP(const Model& model, std::pair<double, double> t_bracket,
                    const TEPOptions& opt = {});

/// Angle between the two non-stationary eigenvectors of a 3 x 3 generator.
double eigenvector_angle(const RateMatrix& M);

DownRateBounds down_rate_bounds(const Model& model, double e_cut, int samples = 4000);

std::vector<LowTRow> low_T_diagnostics(const Model& model, const std::vector<double>& betas,
                                       double tol = kDefaultRateTol);

}  // namespace vdbtherm
