#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "ctap/errors.hpp"
#include "ctap/evolution.hpp"

using namespace ctap;

namespace {

PotentialSnapshot harmonic(const Grid1D& grid, double center = 0.0, double w = 1.0) {
  PotentialSnapshot s;
  s.x = grid.positions();
  s.values = s.x.unaryExpr([=](double x) { return 0.5 * w * w * (x - center) * (x - center); });
  return s;
}

PropagationOptions free_options(double t_end, double dt) {
  PropagationOptions o;
  o.t_end = t_end;
  o.dt = dt;
  o.track_populations = false;
  o.n_samples = 2;
  return o;
}

}  // namespace

TEST_CASE("grid layout") {
  const Grid1D g{-4.0, 4.0, 256};
  CHECK(g.dx() == 8.0 / 256);
  CHECK(g.positions()(0) == -4.0);
  CHECK(g.positions()(255) == doctest::Approx(4.0 - g.dx()));
  const Eigen::VectorXd k = g.wavenumbers();
  CHECK(k(1) == doctest::Approx(2 * M_PI / 8.0));
  CHECK(k(255) == doctest::Approx(-2 * M_PI / 8.0));
  CHECK(g.max_wavenumber() == doctest::Approx(M_PI / g.dx()));
  CHECK_THROWS_AS((Grid1D{0.0, 1.0, 300}.validate()), DomainError);
  CHECK_THROWS_AS((Grid1D{1.0, 0.0, 256}.validate()), DomainError);
}

TEST_CASE("spectral kinetic operator differentiates exactly") {
  const Grid1D g{-M_PI, M_PI, 256};
  SpectralKinetic t(g, 0.5);
  Eigen::VectorXcd psi = g.positions().unaryExpr([](double x) { return std::complex<double>(std::sin(3 * x), 0); });
  Eigen::VectorXcd out;
  t.apply(psi, out);
  CHECK((out - 4.5 * psi).norm() < 1e-10);
  CHECK(t.max_energy() == doctest::Approx(0.5 * std::pow(g.max_wavenumber(), 2)));
}

TEST_CASE("free Gaussian spreads as predicted") {
  const Grid1D g{-64.0, 64.0, 512};
  const Wavefunction psi0 = gaussian_wavefunction(g, 0.0, 1.0);
  CHECK(psi0.norm() == doctest::Approx(1.0).epsilon(1e-14));
  const double t_end = 2.0;
  const RunRecord r = propagate(psi0, [](double, Eigen::Ref<Eigen::VectorXd> v) { v.setZero(); },
                                free_options(t_end, 1e-3));
  const Eigen::VectorXd x = g.positions();
  double err = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    err = std::max(err, std::abs(r.final_state.amplitudes(i) - oracle::free_gaussian(x(i), t_end, 1.0, 0.5)));
  }
  CHECK(err < 1e-6);
}

TEST_CASE("harmonic ground state") {
  const Grid1D g{-12.0, 12.0, 256};
  // Displaced, wrong-width start: the default guess is already exact here.
  GroundStateOptions start;
  start.center = 1.0;
  start.width = 2.0;
  const GroundState gs = ground_state_imaginary_time(harmonic(g), 0.0, 0.5, start);
  CHECK(gs.iterations > 0);
  CHECK(gs.mu == doctest::Approx(0.5).epsilon(1e-8));
  const Eigen::VectorXd x = g.positions();
  // Fix the global phase before comparing.
  const std::complex<double> phase = gs.psi.amplitudes(128) / std::abs(gs.psi.amplitudes(128));
  double err = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double ref = std::pow(M_PI, -0.25) * std::exp(-0.5 * x(i) * x(i));
    err = std::max(err, std::abs(gs.psi.amplitudes(i) / phase - ref));
  }
  CHECK(err < 1e-6);
  CHECK(gs.residual <= 1e-8);
}

TEST_CASE("interacting ground state energetics") {
  const Grid1D g{-12.0, 12.0, 256};
  const PotentialSnapshot s = harmonic(g);
  const double coupling = 0.8;
  const GroundState gs = ground_state_imaginary_time(s, coupling, 0.5);
  SpectralKinetic t(g, 0.5);
  const double e = energy_functional(gs.psi, s.values, coupling, t);
  const double quartic = gs.psi.density().array().square().sum() * g.dx();
  // mu - E is the interaction energy counted once more.
  CHECK(gs.mu - e == doctest::Approx(0.5 * coupling * quartic).epsilon(1e-9));
  CHECK(gs.mu > 0.5);
  CHECK(stationary_residual(gs.psi, s.values, coupling, t) <= 1e-8);
}

TEST_CASE("chemical potential of a displaced Gaussian") {
  // <T> = c / (2 s^2), <V> = w^2 (s^2 + d^2) / 4 for a normalised Gaussian.
  const Grid1D g{-20.0, 20.0, 512};
  const Wavefunction psi = gaussian_wavefunction(g, 0.7, 1.3);
  SpectralKinetic t(g, 0.5);
  const double mu = chemical_potential(psi, harmonic(g).values, 0.0, t);
  CHECK(mu == doctest::Approx(0.5 / (2 * 1.3 * 1.3) + 0.5 * (1.3 * 1.3 / 2 + 0.49)).epsilon(1e-10));
}

TEST_CASE("norm drift and second-order convergence") {
  const Grid1D g{-64.0, 64.0, 256};
  const Wavefunction psi0 = gaussian_wavefunction(g, 0.5, 1.0);
  const Eigen::VectorXd x = g.positions();
  const PotentialFunction moving = [x](double t, Eigen::Ref<Eigen::VectorXd> v) {
    const double c = std::sin(t);
    v = 0.5 * (x.array() - c).square().matrix();
  };
  auto final_state = [&](double dt) { return propagate(psi0, moving, free_options(2.0, dt)).final_state.amplitudes; };
  const Eigen::VectorXcd ref = final_state(2.5e-4);
  const double e1 = (final_state(4e-3) - ref).norm();
  const double e2 = (final_state(2e-3) - ref).norm();
  CHECK(e1 / e2 >= 3.5);
  const RunRecord r = propagate(psi0, moving, free_options(2.0, 2e-3));
  CHECK(r.norm_drift() < 1e-9);
}

TEST_CASE("time reversal recovers the initial state") {
  const Grid1D g{-64.0, 64.0, 256};
  const Wavefunction psi0 = gaussian_wavefunction(g, 0.0, 1.0);
  const Eigen::VectorXd x = g.positions();
  const PotentialFunction moving = [x](double t, Eigen::Ref<Eigen::VectorXd> v) {
    v = 0.5 * (x.array() - 1.5 * std::sin(0.7 * t)).square().matrix();
  };
  const RunRecord fwd = propagate(psi0, moving, free_options(3.0, 1e-3));
  PropagationOptions back = free_options(0.0, 1e-3);
  back.t_start = 3.0;
  const RunRecord bwd = propagate(fwd.final_state, moving, back);
  CHECK(overlap(bwd.final_state, psi0) > 0.999);
}

TEST_CASE("zero coupling follows the linear path exactly") {
  const Grid1D g{-64.0, 64.0, 256};
  const Wavefunction psi0 = gaussian_wavefunction(g, 0.3, 0.9);
  const Eigen::VectorXd x = g.positions();
  const PotentialFunction v = [x](double, Eigen::Ref<Eigen::VectorXd> out) { out = 0.5 * x.array().square().matrix(); };
  PropagationOptions a = free_options(1.0, 1e-3);
  PropagationOptions b = a;
  b.g = 0.0;
  b.norm_drift_limit = 1e-6;
  CHECK(propagate(psi0, v, a).final_state.amplitudes == propagate(psi0, v, b).final_state.amplitudes);
}

TEST_CASE("propagation guards") {
  const Grid1D g{-64.0, 64.0, 256};
  const Wavefunction psi0 = gaussian_wavefunction(g, 0.0, 1.0);
  const PotentialFunction zero = [](double, Eigen::Ref<Eigen::VectorXd> v) { v.setZero(); };
  CHECK_THROWS_AS(propagate(psi0, zero, free_options(1.0, 0.1)), ConfigError);
  // A packet that reaches the periodic edge is rejected.
  const Wavefunction wide = gaussian_wavefunction(g, 0.0, 16.0);
  PropagationOptions o = free_options(1.0, 1e-3);
  o.n_samples = 10;
  CHECK_THROWS_AS(propagate(wide, zero, o), SolverError);
  Wavefunction unnormalised = psi0;
  unnormalised.amplitudes *= 2.0;
  CHECK_THROWS_AS(propagate(unnormalised, zero, free_options(1.0, 1e-3)), DomainError);
}

TEST_CASE("populations by region") {
  const Grid1D g{-12.0, 12.0, 256};
  TrapGeometry geo;
  geo.minima_positions = {-6.0, 0.0, 6.0};
  geo.barrier_positions = {-3.0, 3.0};
  const Populations left = trap_populations(gaussian_wavefunction(g, -6.0, 0.5), geo);
  CHECK(left[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(left[1] + left[2] < 1e-12);
  Wavefunction flat{g, Eigen::VectorXcd::Ones(256)};
  flat.normalize();
  const Populations thirds = trap_populations(flat, TrapGeometry{{-8, 0, 8}, {}, {}, {}, {-4.0, 4.0}, {}});
  for (double p : thirds) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("isolated trap keeps its own region") {
  const Grid1D g{-12.0, 12.0, 512};
  PotentialSnapshot s;
  s.x = g.positions();
  s.values = s.x.unaryExpr([](double x) {
    return 0.5 * std::min({(x + 5) * (x + 5), x * x, (x - 5) * (x - 5)});
  });
  const TrapGeometry geo = trap_geometry(s, 3, 0.5);
  const PotentialSnapshot iso = isolate_trap(s, geo, 0, 0.5);
  for (Eigen::Index i = 0; i < s.x.size(); ++i) {
    if (s.x(i) < geo.barrier_positions[0] - 0.1) CHECK(iso.values(i) == s.values(i));
  }
  CHECK(iso.values(s.x.size() - 1) > 10.0);
  const GroundState gs = ground_state_imaginary_time(iso, 0.0, 0.5);
  // The continuation past the barrier is softer than the parabola it replaces.
  CHECK(gs.mu == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(gs.mu < 0.5);
}

TEST_CASE("effective 1D coupling") {
  const AtomSpecies rb = AtomSpecies::rubidium87();
  const double got = g1d_from_atoms(InteractionParams{2.0, 5.3e-9, 1.3e-7}, rb);
  CHECK(got == doctest::Approx(oracle::g1d(2.0, 5.3e-9, 1.3e-7, rb.mass_kg)).epsilon(1e-12));
  CHECK(g1d_from_atoms(InteractionParams{0.0, 5.3e-9, 1.3e-7}, rb) == 0.0);
  CHECK_THROWS_AS(g1d_from_atoms(InteractionParams{2.0, 1e-7, 1.3e-7}, rb), DomainError);
  const UnitScaling s = default_scaling(rb, 1e4);
  CHECK(g1d_to_dimensionless(got, s) == doctest::Approx(got / (s.energy_J * s.length_m)));
}
