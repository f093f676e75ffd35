#ifndef CTAP_UNITS_HPP
#define CTAP_UNITS_HPP

#include <string_view>

namespace ctap {

// CODATA 2018.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double mu_B = 9.2740100783e-24;  // J / T
  static constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
};

/// Hyperfine ground-state data for the trapped species.
///
/// `g_F` is signed. The resonance condition uses |g_F| so that traps sit at
/// positive x for either sign; the sign only matters for the Rabi coupling.
struct AtomSpecies {
  double mass_kg;
  double g_F;
  double F;
  double m_F;
  double m_F_prime;

  static AtomSpecies rubidium87();

  // Throws DomainError on a non-physical species.
  void validate() const;
};

enum class QuantityKind { length, time, energy, frequency };

// Throws DomainError for anything other than length/time/energy/frequency.
QuantityKind parse_quantity_kind(std::string_view name);

/// Scales between SI and the dimensionless system used by all numerics.
///
/// energy_J * time_s == hbar always holds, so the dimensionless Schrodinger
/// equation reads i dpsi/dt = H psi. With default_scaling the kinetic term
/// is exactly -(1/2) d^2/dx^2.
struct UnitScaling {
  double length_m;
  double time_s;
  double energy_J;

  // hbar^2 / (2 m L^2 E): prefactor of -d^2/dx^2 in dimensionless units.
  double kinetic_coefficient(const AtomSpecies& species) const;
};

// Harmonic-oscillator units of a trap with angular frequency omega_ref (rad/s).
UnitScaling default_scaling(const AtomSpecies& species, double omega_ref);

double to_dimensionless(double value_si, QuantityKind kind, const UnitScaling& s);
double from_dimensionless(double value, QuantityKind kind, const UnitScaling& s);

}  // namespace ctap

#endif  // CTAP_UNITS_HPP
