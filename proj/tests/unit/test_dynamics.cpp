#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "vdbtherm/dynamics.hpp"
#include "vdbtherm/errors.hpp"
#include "vdbtherm/rates.hpp"

using namespace vdbtherm;
namespace vt = vdbtherm::testing;

namespace {

RateMatrix k3() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(3, 3);
  return RateMatrix::from_offdiagonal(a);
}

// Double eigenvalue -4 with a single eigenvector.
RateMatrix exact_lep() {
  Eigen::MatrixXd a(3, 3);
  a << 0, 1, 1, 1, 0, 2, 2, 1, 0;
  return RateMatrix::from_offdiagonal(a);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

Eigen::VectorXd inset_state() { return Eigen::Vector3d(0.893, 0.04, 0.067); }

}  // namespace

TEST(Decompose, ZeroGeneratorIsIdentity) {
  RateMatrix M{Eigen::MatrixXd::Zero(4, 4)};
  const auto d = decompose(M);
  ASSERT_EQ(d.blocks.size(), 1u);
  EXPECT_EQ(d.blocks[0].dim, 4);
  for (double t : {0.0, 1.0, 1e3}) EXPECT_LT((d.exp(t) - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-15);
}

TEST(Decompose, CompleteGraphIsDiagonalizable) {
  const auto d = decompose(k3());
  int found = 0;
  for (const auto& b : d.blocks) {
    if (std::abs(b.eigenvalue + 3.0) < 1e-9) {
      EXPECT_EQ(b.dim, 2);
      EXPECT_EQ(b.geometric, 2);
      EXPECT_FALSE(b.jordan);
      ++found;
    }
  }
  EXPECT_EQ(found, 1);
  EXPECT_LT(d.reconstruction_error(), 1e-10 * d.norm);
  for (double t : {0.1, 1.0, 5.0}) EXPECT_LT((d.exp(t) - exp_oracle(k3().m, t)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Decompose, ExactLepUsesJordanChain) {
  const auto M = exact_lep();
  const auto d = decompose(M);
  bool jordan = false;
  for (const auto& b : d.blocks)
    if (b.jordan) {
      jordan = true;
      EXPECT_EQ(b.dim, 2);
      EXPECT_EQ(b.geometric, 1);
      EXPECT_NEAR(b.eigenvalue.real(), -4.0, 1e-6);
    }
  EXPECT_TRUE(jordan);
  for (double t : {0.0, 0.3, 1.0, 3.0})
    EXPECT_LT((d.exp(t) - exp_oracle(M.m, t)).cwiseAbs().maxCoeff(), 1e-9);

  // e^{4t}(e^{Mt} - stationary projector) is linear in t with a nonzero slope.
  const Eigen::MatrixXd p_inf = exp_oracle(M.m, 60.0);
  auto g = [&](double t) -> Eigen::MatrixXd { return (d.exp(t) - p_inf) * std::exp(4.0 * t); };
  const Eigen::MatrixXd slope = g(1.0) - g(0.0);
  EXPECT_GT(slope.norm(), 1e-3);
  EXPECT_LT((g(2.0) - g(0.0) - 2.0 * slope).norm(), 1e-8);
}

TEST(Decompose, SingleStationaryBlockForGenerators) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 4;
    RateMatrix M{vt::random_generator(rng, n)};
    const auto d = decompose(M);
    int stationary = 0;
    for (const auto& b : d.blocks)
      if (b.is_stationary(d.norm)) {
        ++stationary;
        EXPECT_EQ(b.dim, 1);
      }
    EXPECT_EQ(stationary, 1);
    EXPECT_LT(d.reconstruction_error(), 1e-10 * d.norm);
    for (const auto& ev : d.eigenvalues()) EXPECT_LE(ev.real(), 1e-12 * d.norm);
  }
}

TEST(Decompose, RejectsNonSquare) {
  RateMatrix M{Eigen::MatrixXd::Zero(2, 3)};
  EXPECT_THROW(decompose(M), DimensionError);
}

TEST(ExpOracle, IdentityDiagonalAndStochastic) {
  std::mt19937_64 rng(41);
  const Eigen::MatrixXd M = vt::random_generator(rng, 4);
  EXPECT_LT((exp_oracle(M, 0.0) - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-15);
  Eigen::MatrixXd D = Eigen::Vector3d(-1.0, -0.5, 2.0).asDiagonal();
  const Eigen::MatrixXd e = exp_oracle(D, 1.3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e(i, i), std::exp(D(i, i) * 1.3), 1e-13 * e(i, i));
  for (int n = 3; n <= 6; ++n) {
    const Eigen::MatrixXd G = vt::random_generator(rng, n);
    for (double t : {0.01, 1.0, 30.0}) {
      const Eigen::MatrixXd p = exp_oracle(G, t);
      for (int j = 0; j < n; ++j) EXPECT_NEAR(p.col(j).sum(), 1.0, 1e-12);
      EXPECT_GE(p.minCoeff(), -1e-12);
    }
  }
  EXPECT_THROW(exp_oracle(M, -1.0), InputError);
}

TEST(Propagate, MatchesOracleOnRandomFiveLevel) {
  std::mt19937_64 rng(55);
  RateMatrix M{vt::random_generator(rng, 5)};
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(5);
  p0(1) = 0.7;
  p0(4) = 0.3;
  const auto times = linspace(0.0, 10.0, 20);
  const auto tr = propagate(M, p0, times);
  EXPECT_EQ(tr.path, "spectral");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Eigen::VectorXd ref = exp_oracle(M.m, times[i]) * p0;
    EXPECT_LT((tr.populations[i] - ref).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Propagate, ThermalStateIsStationary) {
  const Model m{SystemSpec{}};
  const double beta = 1.0 / 5.0;
  const auto M = build_rate_matrix(compute_rates(beta, m));
  const Eigen::VectorXd pth = boltzmann(beta, m.spectrum);
  const auto tr = propagate(M, pth, linspace(0.0, 50.0, 11));
  for (const auto& p : tr.populations) EXPECT_LT((p - pth).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(observables(tr, pth, M), NormalizationError);
}

TEST(Propagate, RejectsStatesOutsideSimplex) {
  const auto M = k3();
  EXPECT_THROW(propagate(M, Eigen::Vector3d(0.5, 0.6, 0.0), {0.0}), InputError);
  EXPECT_THROW(propagate(M, Eigen::Vector3d(1.1, -0.1, 0.0), {0.0}), InputError);
  EXPECT_THROW(propagate(M, Eigen::Vector3d(1.0, 0.0, 0.0), {-1.0}), InputError);
  EXPECT_THROW(propagate(M, Eigen::Vector2d(1.0, 0.0), {0.0}), DimensionError);
}

TEST(Propagate, ConservesProbabilityAndPositivity) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    RateMatrix M{vt::random_generator(rng, n)};
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n);
    p0(trial % n) = 1.0;
    const auto tr = propagate(M, p0, linspace(0.0, 20.0, 41));
    for (const auto& p : tr.populations) {
      EXPECT_NEAR(p.sum(), 1.0, 1e-12);
      EXPECT_GE(p.minCoeff(), -1e-9);
      EXPECT_LE(p.maxCoeff(), 1.0 + 1e-9);
    }
  }
}

TEST(Propagate, ConvergenceEnvelope) {
  const Model m{SystemSpec{}};
  for (double T : {4.0, 16.0}) {
    const double beta = 1.0 / T;
    const auto M = build_rate_matrix(compute_rates(beta, m));
    const Eigen::VectorXd pth = boltzmann(beta, m.spectrum);
    const double ts = slowest_time(M);
    const auto times = linspace(0.0, 20.0 * ts, 200);
    const auto tr = propagate(M, inset_state(), times);
    double c = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      c = std::max(c, (tr.populations[i] - pth).lpNorm<1>() * std::exp(times[i] / ts));
    EXPECT_LT(c, 10.0);
  }
}

TEST(Observables, InsetCrossesAboveTransitionOnly) {
  const Model m{SystemSpec{}};
  for (auto [T, expect_cross] : {std::pair{16.0, true}, {4.0, false}}) {
    const double beta = 1.0 / T;
    const auto M = build_rate_matrix(compute_rates(beta, m, 1e-11));
    const double ts = slowest_time(M);
    const auto tr = propagate(M, inset_state(), linspace(0.0, 10.0 * ts, 201));
    const auto obs = observables(tr, boltzmann(beta, m.spectrum), M);
    EXPECT_NEAR(obs.t_slow, ts, 1e-12 * ts);
    EXPECT_NEAR(obs.delta_p_rescaled.front(), 1.0, 1e-12);
    const int n = zero_crossings(obs.delta_p_rescaled);
    if (expect_cross) {
      EXPECT_GE(n, 1) << "T=" << T;
    } else {
      EXPECT_EQ(n, 0) << "T=" << T;
    }
  }
}

TEST(ZeroCrossings, IgnoresExactZeros) {
  EXPECT_EQ(zero_crossings({1.0, 0.0, -1.0, 0.0, -2.0, 3.0}), 2);
  EXPECT_EQ(zero_crossings({}), 0);
  EXPECT_EQ(zero_crossings({0.0, 0.0}), 0);
}
