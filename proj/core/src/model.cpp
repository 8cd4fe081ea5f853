#include "vdbtherm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vdbtherm/errors.hpp"

namespace vdbtherm {

namespace {

constexpr double kPi = std::numbers::pi;

cdouble omega_pow(int n) {
  const int r = ((n % 3) + 3) % 3;
  switch (r) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {-0.5, std::numbers::sqrt3 / 2.0};
    default:
      return {-0.5, -std::numbers::sqrt3 / 2.0};
  }
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << name << " must be positive and finite, got " << x;
    throw InputError(os.str());
  }
}

}  // namespace

const char* to_string(Level l) noexcept {
  switch (l) {
    case Level::minus:
      return "-";
    case Level::zero:
      return "0";
    case Level::plus:
      return "+";
  }
  return "?";
}

Level third_level(Level k, Level l) {
  if (k == l) throw InputError("third_level: levels must differ");
  return static_cast<Level>(3 - index(k) - index(l));
}

void SystemSpec::validate() const {
  if (tau == 0.0 || !std::isfinite(tau)) throw InputError("tau must be nonzero and finite");
  if (!std::isfinite(phi)) throw InputError("phi must be finite");
  for (double x : potentials)
    if (!std::isfinite(x)) throw InputError("potentials must be finite");
  require_positive(mass, "mass");
  require_positive(hbar, "hbar");
  require_positive(k_boltzmann, "k_boltzmann");
  require_positive(gas_density, "gas_density");
}

double InteractionMatrix::im_cycle() const {
  const double x = u_cyclic.real(), y = u_cyclic.imag();
  return y * (3.0 * x * x - y * y);
}

double InteractionMatrix::re_cycle() const {
  const double x = u_cyclic.real(), y = u_cyclic.imag();
  return x * (x * x - 3.0 * y * y);
}

Eigen::Matrix3cd ring_hamiltonian(const SystemSpec& spec) {
  const double theta = 2.0 * kPi * spec.phi / 3.0;
  const cdouble f = std::polar(spec.tau, theta);
  const cdouble b = std::conj(f);
  Eigen::Matrix3cd h;
  h << 0.0, b, f,
       f, 0.0, b,
       b, f, 0.0;
  return h;
}

Spectrum diagonalize_ring(const SystemSpec& spec) {
  spec.validate();
  const double theta = 2.0 * kPi * spec.phi / 3.0;

  std::array<std::pair<double, int>, 3> modes;
  for (int n = 0; n < 3; ++n)
    modes[n] = {2.0 * spec.tau * std::cos(2.0 * kPi * n / 3.0 - theta), n};
  std::sort(modes.begin(), modes.end());

  const double scale = std::abs(spec.tau);
  for (int i = 0; i < 2; ++i) {
    if (modes[i + 1].first - modes[i].first < 1e-10 * scale) {
      std::ostringstream os;
      os << "degenerate ring spectrum (phi=" << spec.phi << ", levels "
         << modes[i].first << " and " << modes[i + 1].first << ")";
      throw DegeneracyError(os.str());
    }
  }

  Spectrum s;
  const double norm = 1.0 / std::sqrt(3.0);
  for (int k = 0; k < 3; ++k) {
    const int n = modes[k].second;
    s.energies[k] = modes[k].first;
    s.fourier_index[k] = n;
    for (int i = 0; i < 3; ++i) s.eigenvectors[k](i) = norm * omega_pow(n * i);
  }

  const Eigen::Matrix3cd h = ring_hamiltonian(spec);
  for (int k = 0; k < 3; ++k) {
    const double r = (h * s.eigenvectors[k] - s.energies[k] * s.eigenvectors[k]).norm();
    if (r > 1e-12 * scale)
      throw std::logic_error("diagonalize_ring: eigenpair residual too large");
  }
  return s;
}

InteractionMatrix interaction_matrix(const SystemSpec& spec, const Spectrum& spectrum) {
  const auto& V = spec.potentials;
  InteractionMatrix out;
  out.w = (V[0] + V[1] + V[2]) / 3.0;
  out.u = {(V[0] - 0.5 * (V[1] + V[2])) / 3.0,
           std::numbers::sqrt3 / 2.0 * (V[1] - V[2]) / 3.0};

  const auto& n = spectrum.fourier_index;
  out.reversed = (((n[1] - n[0]) % 3) + 3) % 3 != 1;
  out.u_cyclic = out.reversed ? std::conj(out.u) : out.u;

  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      if (k == l) {
        out.v(k, l) = out.w;
      } else {
        const int d = (((n[l] - n[k]) % 3) + 3) % 3;
        out.v(k, l) = d == 1 ? out.u : std::conj(out.u);
      }
    }
  }

  // Cross-check against the explicit basis change.
  Eigen::Matrix3cd direct = Eigen::Matrix3cd::Zero();
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        direct(k, l) += std::conj(spectrum.eigenvectors[k](i)) * V[i] *
                        spectrum.eigenvectors[l](i);
  const double vmax = std::max({std::abs(V[0]), std::abs(V[1]), std::abs(V[2]), 1e-300});
  if ((direct - out.v).cwiseAbs().maxCoeff() > 1e-12 * vmax)
    throw std::logic_error("interaction_matrix: closed form disagrees with basis change");
  return out;
}

double vdb_energy_scale(const SystemSpec& spec, const InteractionMatrix& v) {
  const double u2 = v.abs_u_sq();
  if (!(u2 > 0.0)) throw ZeroCouplingError("vdb_energy_scale: off-diagonal coupling u vanishes");
  const double x = 2.0 * std::sqrt(6.0 * spec.mass) * v.im_cycle() / (spec.hbar * u2);
  return x * x;
}

Model::Model(const SystemSpec& s)
    : spec(s), spectrum(diagonalize_ring(s)), v(interaction_matrix(s, spectrum)) {}

}  // namespace vdbtherm
