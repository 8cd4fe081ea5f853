#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "vdbtherm/errors.hpp"
#include "vdbtherm/rates.hpp"
#include "vdbtherm/scattering.hpp"
#include "vdbtherm/spectral.hpp"

using namespace vdbtherm;
namespace vt = vdbtherm::testing;
using L = Level;

namespace {

Model reference_model() { return Model(SystemSpec{}); }

Model model_with(double a, double b, double c) {
  SystemSpec s;
  s.potentials = {a, b, c};
  return Model(s);
}

int sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

TEST(Rates, VanishForEqualPotentials) {
  const auto m = model_with(3, 3, 3);
  const auto r = compute_rates(1.0 / 3.0, m);
  for (auto [k, l] : kPairs) EXPECT_EQ(r(k, l), 0.0);
}

TEST(Rates, PositiveAtReferenceParameters) {
  const auto m = reference_model();
  const auto r = compute_rates(1.0 / 3.0, m);
  for (auto [k, l] : kPairs) {
    EXPECT_GT(r(k, l), 0.0);
    EXPECT_LT(r.abs_error[index(k)][index(l)], 1e-9 * r(k, l) * 10);
  }
}

TEST(Rates, MatchMomentumIntegralAtReferenceParameters) {
  const auto m = reference_model();
  const double beta = 1.0 / 3.0;
  for (auto [k, l] : kPairs) {
    const double a = transition_rate(k, l, beta, m).value;
    const double o = vt::momentum_rate(index(k), index(l), beta, m.spec);
    EXPECT_LE(std::abs(a - o), 1e-7 * o) << to_string(k) << to_string(l);
  }
}

TEST(Rates, ClockwiseDominatesInMiddleRegion) {
  SystemSpec s;
  s.potentials = {2.75, 1.5, 4.0};
  const Model m(s);
  const auto r = compute_rates(1.0 / 100.0, m);
  EXPECT_GT(r(L::zero, L::minus), r(L::minus, L::zero));
  EXPECT_GT(r(L::plus, L::zero), r(L::zero, L::plus));
  EXPECT_GT(r(L::minus, L::plus), r(L::plus, L::minus));
}

TEST(Rates, CounterclockwiseDominatesInLateralRegion) {
  const auto m = reference_model();
  const auto r = compute_rates(1.0 / 100.0, m);
  EXPECT_LT(r(L::zero, L::minus), r(L::minus, L::zero));
  EXPECT_LT(r(L::plus, L::zero), r(L::zero, L::plus));
  EXPECT_LT(r(L::minus, L::plus), r(L::plus, L::minus));
}

TEST(Rates, BetaRange) {
  const auto m = reference_model();
  EXPECT_THROW(compute_rates(1e-7, m), RangeError);
  EXPECT_THROW(compute_rates(2e6, m), RangeError);
  EXPECT_THROW(compute_rates(-1.0, m), RangeError);
  EXPECT_THROW(transition_rate(L::zero, L::zero, 1.0, m), InputError);
}

TEST(Rates, LinearInGasDensity) {
  SystemSpec s;
  const auto a = compute_rates(0.2, Model(s));
  s.gas_density = 3.5;
  const auto b = compute_rates(0.2, Model(s));
  for (auto [k, l] : kPairs) EXPECT_NEAR(b(k, l), 3.5 * a(k, l), 1e-13 * b(k, l));
}

TEST(Rates, UpRatesVanishExponentially) {
  const auto m = reference_model();
  const auto& e = m.spectrum.energies;
  double prev_ratio = 1.0;
  for (double bg : {5.0, 10.0, 20.0, 30.0}) {
    const double beta = bg / (e[2] - e[0]);
    const auto r = compute_rates(beta, m);
    const double ratio = r(L::plus, L::minus) / r(L::minus, L::plus);
    EXPECT_LT(ratio, prev_ratio);
    prev_ratio = ratio;
    const double exponent = -std::log(ratio) / (beta * (e[2] - e[0]));
    EXPECT_GT(exponent, 0.5);
    EXPECT_LT(exponent, 1.5);
  }
}

TEST(Decomposition, ReassemblesRates) {
  const auto m = reference_model();
  for (double T : {0.5, 3.0, 20.0, 300.0}) {
    const auto d = rate_decomposition(1.0 / T, m);
    const auto r = compute_rates(1.0 / T, m);
    EXPECT_LT(d.max_reassembly_error, 1e-8);
    for (auto [k, l] : kPairs)
      EXPECT_LE(std::abs(d.reassemble(k, l, m.spectrum) - r(k, l)), 1e-8 * r(k, l));
  }
}

TEST(Decomposition, SymmetricPartIsSymmetric) {
  const auto m = reference_model();
  const double beta = 1.0 / 5.0;
  const auto d = rate_decomposition(beta, m);
  const auto r = compute_rates(beta, m);
  const auto& e = m.spectrum.energies;
  for (auto [k, l] : kPairs) {
    // Remove the Boltzmann weight and the odd part in both directions.
    const double s = (index(k) - index(l) + 3) % 3 == 1 ? 1.0 : -1.0;
    const double sym_kl = r(k, l) * std::exp(-beta * e[index(l)]) - s * d.a_tilde_1;
    const double sym_lk = r(l, k) * std::exp(-beta * e[index(k)]) + s * d.a_tilde_1;
    EXPECT_LE(std::abs(sym_kl - sym_lk), 1e-8 * std::abs(sym_kl));
    EXPECT_LE(std::abs(sym_kl - d.a_tilde[index(third_level(k, l))]), 1e-8 * std::abs(sym_kl));
    EXPECT_GT(sym_kl, 0.0);
  }
  EXPECT_GE(d.c0, 0.0);
  EXPECT_GE(d.B_tilde_plus, 0.0);
}

TEST(Decomposition, OddPartVanishesForEqualPotentials) {
  const auto d = rate_decomposition(0.1, model_with(4, 1.5, 4));
  EXPECT_NEAR(d.A1, 0.0, 1e-15);
  EXPECT_NEAR(d.c, 0.0, 1e-15);
}

TEST(Decomposition, OddPartSignAndDominance) {
  const auto m = reference_model();
  const auto d = rate_decomposition(1.0 / 20.0, m);
  EXPECT_EQ(sgn(d.A1), sgn(m.v.im_cycle()));
  EXPECT_LT(d.A1, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_GT(std::abs(d.A1), std::abs(d.B[i] - d.B[j]));
}

TEST(CycleAffinity, ZeroForDetailedBalanceRates) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> g(0.1, 2.0), en(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double beta = 0.7;
    const double e[3] = {en(rng), en(rng), en(rng)};
    double sym[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) sym[i][j] = sym[j][i] = g(rng);
    RateSet r;
    for (auto [k, l] : kPairs) r(k, l) = std::exp(-beta * e[index(k)]) * sym[index(k)][index(l)];
    EXPECT_NEAR(cycle_affinity(r), 0.0, 1e-14);
  }
}

TEST(CycleAffinity, ZeroForEqualPotentials) {
  EXPECT_EQ(cycle_affinity(compute_rates(0.5, model_with(2, 2, 2))), 0.0);
}

TEST(CycleAffinity, IdentityAtThreeTemperatures) {
  const auto m = reference_model();
  for (double T : {1.0, 5.0, 20.0}) {
    const auto d = rate_decomposition(1.0 / T, m, 1e-11);
    const auto& t = d.a_tilde;
    const double c0 = t[0] * t[1] + t[0] * t[2] + t[1] * t[2];
    const double identity = 2.0 * d.a_tilde_1 * (d.a_tilde_1 * d.a_tilde_1 + c0);
    // Boltzmann factors of either cycle multiply to exp(beta tr H) = 1.
    const double direct = cycle_affinity(compute_rates(1.0 / T, m, 1e-11));
    EXPECT_LE(std::abs(identity - direct), 1e-8 * std::abs(direct)) << "T=" << T;
  }
}

TEST(CycleAffinity, SignMatchesClockwiseDefect) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Model m(vt::random_spec(rng));
    const double c = cycle_affinity(compute_rates(0.2, m));
    const double defect =
        microreversibility_defect(2 * m.spectrum.energies[2] + 1, L::zero, L::minus, m).closed_form;
    if (std::abs(m.v.im_cycle()) < 1e-6) continue;
    EXPECT_EQ(sgn(c), sgn(defect));
  }
}

TEST(CycleAffinity, SameSignAndZeroSetAsPotentialProduct) {
  const std::vector<double> grid{0.0, 1.5, 3.0, 4.5, 6.0};
  int reference = 0;
  for (double a : grid)
    for (double b : grid)
      for (double c : grid) {
        const auto m = model_with(a, b, c);
        const double prod = (a - b) * (b - c) * (a - c);
        const double ca = cycle_affinity(compute_rates(0.25, m));
        if (prod == 0.0) {
          EXPECT_NEAR(ca, 0.0, 1e-14);
          continue;
        }
        ASSERT_NE(ca, 0.0);
        const int s = sgn(ca) * sgn(prod);
        if (reference == 0) reference = s;
        EXPECT_EQ(s, reference);
      }
}

TEST(Stationarity, BoltzmannKernelAtSeveralTemperatures) {
  const auto m = reference_model();
  for (double T : {1.0, 5.0, 20.0}) {
    const auto r = compute_rates(1.0 / T, m);
    EXPECT_LT(stationarity_residual(r, 1.0 / T, m.spectrum), 1e-7);
  }
}
