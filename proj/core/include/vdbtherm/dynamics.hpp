#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vdbtherm/model.hpp"
#include "vdbtherm/spectral.hpp"

namespace vdbtherm {

inline constexpr double kDefaultLepTol = 1e-7;
inline constexpr double kMaxCondition = 1e12;

/// One eigenvalue cluster and its invariant subspace.
struct SpectralBlock {
  cdouble eigenvalue;          // cluster mean
  std::vector<cdouble> members;
  int offset = 0;              // first column in Q
  int dim = 0;                 // algebraic multiplicity d
  int geometric = 0;           // geometric multiplicity
  bool jordan = false;         // built from a Jordan chain

  bool is_stationary(double scale) const;
};

struct PropagatorDecomposition {
  Eigen::MatrixXd M;
  Eigen::MatrixXcd Q;          // columns: (generalized) eigenvectors
  Eigen::MatrixXcd Qinv;
  Eigen::MatrixXcd B;          // Qinv M Q restricted to the diagonal blocks
  std::vector<SpectralBlock> blocks;
  double norm = 0.0;           // ||M||_1
  double condition = 1.0;      // cond_2(Q)

  Eigen::Index size() const { return M.rows(); }
  /// e^{Mt}.
  Eigen::MatrixXd exp(double t) const;
  /// Q Qinv M Q Qinv with the off-diagonal blocks dropped; should match M.
  double reconstruction_error() const;
  std::vector<cdouble> eigenvalues() const;
};

PropagatorDecomposition decompose(const RateMatrix& M, double lep_tol = kDefaultLepTol);

/// Dense e^{Mt} by scaled Taylor series and repeated squaring.
Eigen::MatrixXd exp_oracle(const Eigen::MatrixXd& M, double t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> populations;
  std::vector<Eigen::VectorXd> deviations;  // P(t) minus the stationary component
  Eigen::VectorXd initial;
  Eigen::VectorXd stationary;
  std::string path = "spectral";
};

/// Throws InputError unless P0 lies in the simplex to `tol`.
void check_simplex(const Eigen::VectorXd& p, double tol = 1e-9);

Trajectory propagate(const PropagatorDecomposition& d, const Eigen::VectorXd& P0,
                     const std::vector<double>& times);

/// Spectral path, falling back to exp_oracle when the basis is ill conditioned.
Trajectory propagate(const RateMatrix& M, const Eigen::VectorXd& P0,
                     const std::vector<double>& times, double lep_tol = kDefaultLepTol);

struct Observables {
  std::vector<double> delta_p;           // P_level(t) - P_th,level
  std::vector<double> delta_p_rescaled;  // delta_p e^{t/t_slow} / delta_p(0)
  double t_slow = 0.0;
};

/// Slowest dissipative time 1 / |max Re lambda| over nonzero eigenvalues.
double slowest_time(const RateMatrix& M);

Observables observables(const Trajectory& traj, const Eigen::VectorXd& P_th,
                        const RateMatrix& M, int level = index(Level::plus));

/// Sign changes in a series, ignoring exact zeros.
int zero_crossings(const std::vector<double>& series);

}  // namespace vdbtherm
