#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace vdbtherm {

using cdouble = std::complex<double>;

/// Energy levels of the ring, labelled by ascending energy.
enum class Level : int { minus = 0, zero = 1, plus = 2 };

constexpr std::array<Level, 3> kLevels{Level::minus, Level::zero, Level::plus};

constexpr int index(Level l) noexcept { return static_cast<int>(l); }

const char* to_string(Level l) noexcept;

/// The level not in {k, l}.  Requires k != l.
Level third_level(Level k, Level l);

/// Physical parameters of the dots and the gas.
struct SystemSpec {
  double tau = 1.85;
  double phi = 0.575;
  std::array<double, 3> potentials{6.0, 1.5, 4.0};
  double mass = 1.0;
  double hbar = 1.0;
  double k_boltzmann = 1.0;
  double gas_density = 1.0;

  /// Throws InputError if any invariant is violated.
  void validate() const;

  double beta(double temperature) const { return 1.0 / (k_boltzmann * temperature); }
  double temperature(double beta) const { return 1.0 / (k_boltzmann * beta); }
};

struct Spectrum {
  std::array<double, 3> energies{};           // E-, E0, E+
  std::array<Eigen::Vector3cd, 3> eigenvectors;
  std::array<int, 3> fourier_index{};         // n with f_n = (1, w^n, w^2n)/sqrt3

  double energy(Level l) const { return energies[index(l)]; }
  double operator[](Level l) const { return energies[index(l)]; }
};

/// Interaction operator sum_i V_i |chi_i><chi_i| in the energy eigenbasis.
struct InteractionMatrix {
  double w = 0.0;
  cdouble u;           // (V1 + V2 e^{i2pi/3} + V3 e^{-i2pi/3}) / 3
  cdouble u_cyclic;    // v_{-0} = v_{0+} = v_{+-}; equals u or conj(u)
  bool reversed = false;
  Eigen::Matrix3cd v;

  cdouble operator()(Level k, Level l) const { return v(index(k), index(l)); }
  double abs_u_sq() const { return std::norm(u); }
  /// Im(v_{-0} v_{0+} v_{+-}).
  double im_cycle() const;
  double re_cycle() const;
};

Eigen::Matrix3cd ring_hamiltonian(const SystemSpec& spec);

Spectrum diagonalize_ring(const SystemSpec& spec);

InteractionMatrix interaction_matrix(const SystemSpec& spec, const Spectrum& spectrum);

/// E_VDB = (2 sqrt(6m) Im[v_{-0} v_{0+} v_{+-}] / (hbar |u|^2))^2.
double vdb_energy_scale(const SystemSpec& spec, const InteractionMatrix& v);

/// Bundle of everything derived from a SystemSpec.
struct Model {
  SystemSpec spec;
  Spectrum spectrum;
  InteractionMatrix v;

  explicit Model(const SystemSpec& s);
};

}  // namespace vdbtherm
