#include "ctap/units.hpp"

#include <cmath>
#include <string>

#include "ctap/errors.hpp"

namespace ctap {

AtomSpecies AtomSpecies::rubidium87() {
  return AtomSpecies{86.909180527 * PhysicalConstants::atomic_mass_unit, -0.5, 0.5, 0.5, -0.5};
}

void AtomSpecies::validate() const {
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg)) {
    throw DomainError("species mass must be positive");
  }
  if (!std::isfinite(g_F)) throw DomainError("species g_F must be finite");
  // F must be a non-negative integer or half-integer.
  if (!(F >= 0.0) || std::fabs(2.0 * F - std::round(2.0 * F)) > 1e-12) {
    throw DomainError("species F must be a non-negative half-integer");
  }
  if (std::fabs(m_F) > F || std::fabs(m_F_prime) > F) {
    throw DomainError("species |m_F| and |m_F'| must not exceed F");
  }
}

QuantityKind parse_quantity_kind(std::string_view name) {
  if (name == "length") return QuantityKind::length;
  if (name == "time") return QuantityKind::time;
  if (name == "energy") return QuantityKind::energy;
  if (name == "frequency") return QuantityKind::frequency;
  throw DomainError("unknown quantity kind '" + std::string(name) + "'");
}

double UnitScaling::kinetic_coefficient(const AtomSpecies& species) const {
  const double hbar = PhysicalConstants::hbar;
  return hbar * hbar / (2.0 * species.mass_kg * length_m * length_m * energy_J);
}

UnitScaling default_scaling(const AtomSpecies& species, double omega_ref) {
  if (!(omega_ref > 0.0) || !std::isfinite(omega_ref)) {
    throw DomainError("reference frequency must be positive");
  }
  species.validate();
  const double hbar = PhysicalConstants::hbar;
  return UnitScaling{std::sqrt(hbar / (species.mass_kg * omega_ref)), 1.0 / omega_ref,
                     hbar * omega_ref};
}

namespace {

double scale_of(QuantityKind kind, const UnitScaling& s) {
  switch (kind) {
    case QuantityKind::length:
      return s.length_m;
    case QuantityKind::time:
      return s.time_s;
    case QuantityKind::energy:
      return s.energy_J;
    case QuantityKind::frequency:
      return 1.0 / s.time_s;
  }
  throw DomainError("unknown quantity kind");
}

}  // namespace

double to_dimensionless(double value_si, QuantityKind kind, const UnitScaling& s) {
  return value_si / scale_of(kind, s);
}

double from_dimensionless(double value, QuantityKind kind, const UnitScaling& s) {
  return value * scale_of(kind, s);
}

}  // namespace ctap
