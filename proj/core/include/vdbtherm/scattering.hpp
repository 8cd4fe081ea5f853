#pragma once

#include "vdbtherm/model.hpp"

namespace vdbtherm {

/// q = 0 for the clockwise pairs (0,-), (+,0), (-,+); q = 1 otherwise.
int direction_parity(Level k, Level l);

struct TMatrixEvaluation {
  double energy = 0.0;
  Level k = Level::minus;
  Level l = Level::zero;
  double t_abs_sq = 0.0;
  int direction_parity = 0;
};

struct DefectEvaluation {
  double direct = 0.0;       // |T_kl|^2 - |T_lk|^2
  double closed_form = 0.0;
};

/// Floor on |D_T| below which the contour is treated as hitting a pole.
inline constexpr double kPoleFloor = 1e-14;

/// sqrt(E - Ej) on the physical sheet; +i sqrt(Ej - E) below threshold.
cdouble channel_root(double E, double Ej);

/// D_T(E). Requires E >= E0.
cdouble t_denominator(double E, const Model& model);

/// Complex numerator of T_kl with T_kl = T~_kl / D_T.
cdouble t_tilde(double E, Level k, Level l, const Model& model);

/// |T_kl(E)|^2 from the real closed forms on the two admissible bands.
double t_element_sq(double E, Level k, Level l, const Model& model);

TMatrixEvaluation evaluate_t(double E, Level k, Level l, const Model& model);

/// |T_kl|^2 / (sqrt(E-Ek) sqrt(E-El)), evaluated without the 0/0 at threshold.
double rate_kernel(double E, Level k, Level l, const Model& model);

/// |T_kl|^2 - |T_lk|^2 for E > E+.
DefectEvaluation microreversibility_defect(double E, Level k, Level l, const Model& model);

}  // namespace vdbtherm
