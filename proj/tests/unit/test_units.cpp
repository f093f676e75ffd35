#include <doctest.h>

#include <cmath>

#include "ctap/errors.hpp"
#include "ctap/units.hpp"

using namespace ctap;

TEST_CASE("oscillator units make the kinetic prefactor one half") {
  const AtomSpecies rb = AtomSpecies::rubidium87();
  for (double w : {1.0, 2.0 * M_PI * 100.0, 3.7e4}) {
    const UnitScaling s = default_scaling(rb, w);
    CHECK(s.kinetic_coefficient(rb) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.energy_J * s.time_s == doctest::Approx(PhysicalConstants::hbar).epsilon(1e-14));
    CHECK(s.time_s == doctest::Approx(1.0 / w).epsilon(1e-14));
    // sqrt(hbar / m w) by hand.
    CHECK(s.length_m == doctest::Approx(std::sqrt(1.054571817e-34 / (rb.mass_kg * w))).epsilon(1e-14));
  }
}

TEST_CASE("unit round trips") {
  const AtomSpecies rb = AtomSpecies::rubidium87();
  const UnitScaling s = default_scaling(rb, 1.2e4);
  for (auto kind : {QuantityKind::length, QuantityKind::time, QuantityKind::energy, QuantityKind::frequency}) {
    const double v = 3.3e-7;
    CHECK(from_dimensionless(to_dimensionless(v, kind, s), kind, s) == doctest::Approx(v).epsilon(1e-15));
  }
  CHECK(to_dimensionless(1.2e4, QuantityKind::frequency, s) == doctest::Approx(1.0));
}

TEST_CASE("unit parsing and validation") {
  CHECK(parse_quantity_kind("energy") == QuantityKind::energy);
  CHECK_THROWS_AS(parse_quantity_kind("mass"), DomainError);
  CHECK_THROWS_AS(default_scaling(AtomSpecies::rubidium87(), 0.0), DomainError);
  AtomSpecies bad = AtomSpecies::rubidium87();
  bad.mass_kg = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = AtomSpecies::rubidium87();
  bad.m_F = 3.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
