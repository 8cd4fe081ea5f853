#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "vdbtherm/errors.hpp"
#include "vdbtherm/model.hpp"

using namespace vdbtherm;
namespace vt = vdbtherm::testing;

namespace {

SystemSpec reference_spec() { return SystemSpec{}; }

SystemSpec with_potentials(double a, double b, double c) {
  SystemSpec s;
  s.potentials = {a, b, c};
  return s;
}

}  // namespace

TEST(SystemSpec, RejectsInvalidConstants) {
  auto s = reference_spec();
  s.tau = 0.0;
  EXPECT_THROW(s.validate(), InputError);
  s = reference_spec();
  s.mass = -1.0;
  EXPECT_THROW(s.validate(), InputError);
  s = reference_spec();
  s.gas_density = 0.0;
  EXPECT_THROW(s.validate(), InputError);
  s = reference_spec();
  s.hbar = 0.0;
  EXPECT_THROW(s.validate(), InputError);
  s = reference_spec();
  s.k_boltzmann = -2.0;
  EXPECT_THROW(s.validate(), InputError);
  EXPECT_NO_THROW(reference_spec().validate());
}

TEST(Spectrum, MatchesDenseHermitianSolver) {
  const auto s = reference_spec();
  const auto sp = diagonalize_ring(s);
  const auto ref = vt::dense_reference(s);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sp.energies[i], ref.energies[i], 1e-12);
  EXPECT_LT(sp.energies[0], sp.energies[1]);
  EXPECT_LT(sp.energies[1], sp.energies[2]);
  EXPECT_GT(sp.energies[2], 0.0);
  EXPECT_NEAR(sp.energies[0], -3.6544468602, 1e-9);
  EXPECT_NEAR(sp.energies[1], 1.3259614133, 1e-9);
  EXPECT_NEAR(sp.energies[2], 2.3284854469, 1e-9);
}

TEST(Spectrum, EigenpairsAndOrthonormality) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = vt::random_spec(rng);
    const auto sp = diagonalize_ring(s);
    const auto h = vt::site_hamiltonian(s.tau, s.phi);
    for (int i = 0; i < 3; ++i) {
      const auto& v = sp.eigenvectors[i];
      EXPECT_LT((h * v - sp.energies[i] * v).norm(), 1e-12 * std::abs(s.tau));
      for (int j = 0; j < 3; ++j) {
        const cdouble dot = sp.eigenvectors[j].dot(v);
        EXPECT_NEAR(std::abs(dot - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
      }
    }
  }
}

TEST(Spectrum, GaugeFirstNonzeroComponentRealPositive) {
  const auto sp = diagonalize_ring(reference_spec());
  for (const auto& v : sp.eigenvectors) {
    int j = 0;
    while (std::abs(v[j]) < 1e-12) ++j;
    EXPECT_GT(v[j].real(), 0.0);
    EXPECT_DOUBLE_EQ(v[j].imag(), 0.0);
  }
}

TEST(Spectrum, DegenerateAtZeroFluxThrows) {
  SystemSpec s;
  s.tau = 1.0;
  s.phi = 0.0;
  EXPECT_THROW(diagonalize_ring(s), DegeneracyError);
}

TEST(Spectrum, FluxPeriodThree) {
  auto s = reference_spec();
  const auto a = diagonalize_ring(s);
  s.phi += 3.0;
  const auto b = diagonalize_ring(s);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.energies[i], b.energies[i], 1e-12);
}

TEST(Spectrum, FluxReversalConjugatesEigenvectors) {
  auto s = reference_spec();
  const auto a = diagonalize_ring(s);
  s.phi = -s.phi;
  const auto b = diagonalize_ring(s);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(a.energies[i], b.energies[i], 1e-12);
    const cdouble overlap = b.eigenvectors[i].dot(a.eigenvectors[i].conjugate());
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
  }
}

TEST(InteractionMatrix, SymmetricPotentialsDecouple) {
  const auto s = with_potentials(1, 1, 1);
  const Model m(s);
  EXPECT_NEAR(m.v.w, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(m.v.u), 0.0, 1e-15);
}

TEST(InteractionMatrix, ReferenceValues) {
  const Model m(reference_spec());
  EXPECT_NEAR(m.v.w, 23.0 / 6.0, 1e-14);
  const double rhs = (6 - 1.5) * (6 - 4) * (1.5 - 4);
  EXPECT_NEAR(6 * std::sqrt(3.0) * std::imag(m.v.u * m.v.u * m.v.u), rhs, 1e-12);
  EXPECT_NE(m.v.im_cycle(), 0.0);
}

TEST(InteractionMatrix, HermitianUniformOffDiagonalAndBasisChange) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = vt::random_spec(rng);
    const Model m(s);
    const auto& v = m.v.v;
    EXPECT_LT((v - v.adjoint()).norm(), 1e-12 * (1 + v.norm()));
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(v(k, k).real(), m.v.w, 1e-12 * (1 + std::abs(m.v.w)));
      for (int l = 0; l < 3; ++l)
        if (k != l) EXPECT_NEAR(std::norm(v(k, l)), m.v.abs_u_sq(), 1e-11 * (1 + m.v.abs_u_sq()));
    }
    // Cyclic products agree with the dense solver up to the eigenvector gauge.
    const auto ref = vt::dense_reference(s);
    const cdouble cyc_ref = ref.v(0, 1) * ref.v(1, 2) * ref.v(2, 0);
    const cdouble cyc = v(0, 1) * v(1, 2) * v(2, 0);
    EXPECT_NEAR(std::abs(cyc - cyc_ref), 0.0, 1e-10 * (1 + std::abs(cyc)));
    EXPECT_NEAR(cyc.imag(), m.v.im_cycle(), 1e-10 * (1 + std::abs(cyc)));
  }
}

TEST(InteractionMatrix, EqualPotentialsGiveRealU) {
  for (double v1 : {0.0, 2.0, 7.5}) {
    const Model m(with_potentials(v1, 3.0, 3.0));
    EXPECT_NEAR(m.v.u.imag(), 0.0, 1e-14);
    EXPECT_NEAR(m.v.im_cycle(), 0.0, 1e-12);
  }
}

TEST(InteractionMatrix, FactorizationOverRandomTriples) {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  const auto sp = diagonalize_ring(reference_spec());
  for (int trial = 0; trial < 1000; ++trial) {
    SystemSpec s;
    s.potentials = {d(rng), d(rng), d(rng)};
    const auto v = interaction_matrix(s, sp);
    const auto& p = s.potentials;
    const double rhs = (p[0] - p[1]) * (p[0] - p[2]) * (p[1] - p[2]);
    const double lhs = 6.0 * std::sqrt(3.0) * std::imag(v.u * v.u * v.u);
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(InteractionMatrix, CyclicRelabelingInvariants) {
  const auto a = Model(with_potentials(6, 1.5, 4));
  const auto b = Model(with_potentials(1.5, 4, 6));
  EXPECT_NEAR(a.v.w, b.v.w, 1e-14);
  EXPECT_NEAR(std::abs(a.v.u), std::abs(b.v.u), 1e-14);
  EXPECT_NEAR(a.v.im_cycle(), b.v.im_cycle(), 1e-12);
  EXPECT_NEAR(vdb_energy_scale(a.spec, a.v), vdb_energy_scale(b.spec, b.v), 1e-10);
}

TEST(VdbEnergyScale, PositiveForReferenceParameters) {
  const Model m(reference_spec());
  const double e = vdb_energy_scale(m.spec, m.v);
  const double direct = std::pow(2.0 * std::sqrt(6.0) * m.v.im_cycle() / m.v.abs_u_sq(), 2);
  EXPECT_GT(e, 0.0);
  EXPECT_NEAR(e, direct, 1e-12 * direct);
  EXPECT_NEAR(e, 39.183, 1e-3);
}

TEST(VdbEnergyScale, ZeroWhenTwoPotentialsEqual) {
  const Model m(with_potentials(1.5, 1.5, 4));
  EXPECT_NEAR(vdb_energy_scale(m.spec, m.v), 0.0, 1e-20);
}

TEST(VdbEnergyScale, SwapInvariant) {
  const Model a(with_potentials(6, 1.5, 4));
  const Model b(with_potentials(6, 4, 1.5));
  EXPECT_NEAR(vdb_energy_scale(a.spec, a.v), vdb_energy_scale(b.spec, b.v), 1e-10);
}

TEST(VdbEnergyScale, ZeroCouplingThrows) {
  const Model m(with_potentials(2, 2, 2));
  EXPECT_THROW(vdb_energy_scale(m.spec, m.v), ZeroCouplingError);
}

TEST(Levels, ThirdLevel) {
  EXPECT_EQ(third_level(Level::minus, Level::zero), Level::plus);
  EXPECT_EQ(third_level(Level::plus, Level::minus), Level::zero);
  EXPECT_THROW(third_level(Level::zero, Level::zero), InputError);
}
