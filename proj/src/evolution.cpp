#include "ctap/evolution.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "ctap/csv.hpp"
#include "ctap/errors.hpp"

namespace ctap {

using cd = std::complex<double>;

void Grid1D::validate() const {
  if (!(x_max > x_min)) throw DomainError("grid: x_max must exceed x_min");
  if (n_points < 256 || (n_points & (n_points - 1)) != 0) {
    throw DomainError("grid: n_points must be a power of two and at least 256");
  }
}

Eigen::VectorXd Grid1D::positions() const {
  return Eigen::VectorXd::LinSpaced(n_points, 0.0, static_cast<double>(n_points - 1)).array() * dx() + x_min;
}

Eigen::VectorXd Grid1D::wavenumbers() const {
  Eigen::VectorXd k(n_points);
  const double dk = 2.0 * std::numbers::pi / length();
  for (Eigen::Index i = 0; i < n_points; ++i) {
    const Eigen::Index m = i < n_points / 2 ? i : i - n_points;
    k(i) = dk * static_cast<double>(m);
  }
  return k;
}

double Grid1D::max_wavenumber() const { return std::numbers::pi / dx(); }

void Wavefunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw SolverError("cannot normalise a zero or non-finite wavefunction");
  amplitudes /= std::sqrt(n);
}

Wavefunction gaussian_wavefunction(const Grid1D& grid, double center, double sigma, double k0) {
  Wavefunction psi{grid, Eigen::VectorXcd(grid.n_points)};
  const Eigen::VectorXd x = grid.positions();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (x(i) - center) / sigma;
    psi.amplitudes(i) = std::exp(-0.5 * u * u) * std::polar(1.0, k0 * x(i));
  }
  psi.normalize();
  return psi;
}

double overlap(const Wavefunction& a, const Wavefunction& b) {
  return std::abs(a.amplitudes.dot(b.amplitudes)) * a.grid.dx();
}

double g1d_from_atoms(const InteractionParams& p, const AtomSpecies& species) {
  if (!(p.n_atoms >= 0.0)) throw DomainError("g1d: atom number must be non-negative");
  if (!(p.a_perp_m > 0.0)) throw DomainError("g1d: transverse width must be positive");
  const double denom = p.a_perp_m - kConfinementConstant * p.a_s_m;
  if (!(denom > 0.0)) throw DomainError("g1d: a_perp <= C a_s (confinement-induced resonance)");
  const double hbar = PhysicalConstants::hbar;
  return 4.0 * p.n_atoms * hbar * hbar * p.a_s_m / (species.mass_kg * p.a_perp_m) / denom;
}

// ---------------------------------------------------------------------------

struct SpectralKinetic::Impl {
  mutable Eigen::FFT<double> fft;
};

SpectralKinetic::SpectralKinetic(const Grid1D& grid, double kinetic_coefficient)
    : grid_(grid), kappa_(kinetic_coefficient), impl_(std::make_unique<Impl>()) {
  grid_.validate();
  if (!(kappa_ > 0.0)) throw DomainError("kinetic coefficient must be positive");
  spectrum_ = kappa_ * grid_.wavenumbers().array().square();
}

SpectralKinetic::~SpectralKinetic() = default;
SpectralKinetic::SpectralKinetic(SpectralKinetic&&) noexcept = default;
SpectralKinetic& SpectralKinetic::operator=(SpectralKinetic&&) noexcept = default;

double SpectralKinetic::max_energy() const {
  const double k = grid_.max_wavenumber();
  return kappa_ * k * k;
}

void SpectralKinetic::forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const { impl_->fft.fwd(out, in); }
void SpectralKinetic::inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const { impl_->fft.inv(out, in); }

void SpectralKinetic::apply(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
  Eigen::VectorXcd k;
  forward(psi, k);
  k.array() *= spectrum_.array();
  inverse(k, out);
}

namespace {

Eigen::VectorXcd apply_gp(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                          const SpectralKinetic& kinetic) {
  Eigen::VectorXcd out;
  kinetic.apply(psi.amplitudes, out);
  out.array() += (potential.array() + g * psi.amplitudes.cwiseAbs2().array()) * psi.amplitudes.array();
  return out;
}

// Linear interpolation of a snapshot, clamped to its ends.
double potential_at_position(const PotentialSnapshot& s, double x) {
  const Eigen::Index n = s.x.size();
  const double u = (x - s.x(0)) / s.dx();
  if (u <= 0.0) return s.values(0);
  if (u >= static_cast<double>(n - 1)) return s.values(n - 1);
  const auto i = static_cast<Eigen::Index>(u);
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * s.values(i) + f * s.values(i + 1);
}

}  // namespace

double chemical_potential(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                          const SpectralKinetic& kinetic) {
  const Eigen::VectorXcd h = apply_gp(psi, potential, g, kinetic);
  return psi.amplitudes.dot(h).real() / psi.amplitudes.squaredNorm();
}

double energy_functional(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                         const SpectralKinetic& kinetic) {
  Eigen::VectorXcd t;
  kinetic.apply(psi.amplitudes, t);
  const Eigen::ArrayXd rho = psi.amplitudes.cwiseAbs2().array();
  const double n2 = psi.amplitudes.squaredNorm();
  const double norm = n2 * psi.grid.dx();
  const double linear = (psi.amplitudes.dot(t).real() + (potential.array() * rho).sum()) / n2;
  return linear + 0.5 * g * psi.grid.dx() * (rho * rho).sum() / (norm * norm);
}

double stationary_residual(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                           const SpectralKinetic& kinetic) {
  const Eigen::VectorXcd h = apply_gp(psi, potential, g, kinetic);
  const double mu = psi.amplitudes.dot(h).real() / psi.amplitudes.squaredNorm();
  return std::sqrt((h - mu * psi.amplitudes).squaredNorm() * psi.grid.dx());
}

// ---------------------------------------------------------------------------

GroundState ground_state_imaginary_time(const PotentialSnapshot& potential, double g, double kinetic_coefficient,
                                        const GroundStateOptions& opt) {
  const Eigen::Index n = potential.x.size();
  if (n < 2) throw DomainError("ground state: empty potential");
  if (!(opt.tolerance > 0.0)) throw DomainError("ground state: tolerance must be positive");
  if (!potential.values.allFinite()) throw DomainError("ground state: potential must be finite");
  Grid1D grid{potential.x(0), potential.x(0) + potential.dx() * static_cast<double>(n), n};
  SpectralKinetic kinetic(grid, kinetic_coefficient);

  double center = 0.0;
  double width = 0.0;
  if (!opt.center || !opt.width) {
    Eigen::Index imin;
    potential.values.minCoeff(&imin);
    center = potential.x(imin);
    // Local curvature from the three points around the deepest grid value.
    double curv = 0.0;
    if (imin > 0 && imin + 1 < n) {
      const double dx = potential.dx();
      curv = (potential.values(imin - 1) - 2.0 * potential.values(imin) + potential.values(imin + 1)) / (dx * dx);
    }
    width = curv > 0.0 ? std::pow(2.0 * kinetic_coefficient / curv, 0.25) : 0.05 * grid.length();
  }
  if (opt.center) center = *opt.center;
  if (opt.width) width = *opt.width;

  Wavefunction psi = gaussian_wavefunction(grid, center, width);
  // Shift to a non-negative potential so exp(-V dtau) cannot overflow.
  const double v_ref = potential.values.minCoeff();
  const Eigen::ArrayXd v_shifted = potential.values.array() - v_ref;

  double step = opt.initial_step;
  Eigen::ArrayXd half_kin = (-0.5 * step * kinetic.spectrum().array()).exp();
  Eigen::VectorXcd work;
  double residual = stationary_residual(psi, potential.values, g, kinetic);
  double last_checked = residual;
  long it = 0;
  while (residual > opt.tolerance) {
    if (it >= opt.max_iterations) {
      throw SolverError("ground state did not converge: residual " + format_double(residual) + " after " +
                        std::to_string(it) + " iterations");
    }
    // Each check spans at least one unit of imaginary time so that slow
    // convergence at small steps is not mistaken for stagnation.
    const long sweep = std::max(opt.check_interval, static_cast<long>(std::ceil(1.0 / step)));
    for (long k = 0; k < sweep; ++k, ++it) {
      // Density from the start of the step: at the fixed point it is the
      // stationary density itself, which keeps the bias O(step^2).
      const Eigen::ArrayXd rho = psi.amplitudes.cwiseAbs2().array();
      kinetic.forward(psi.amplitudes, work);
      work.array() *= half_kin;
      kinetic.inverse(work, psi.amplitudes);
      psi.amplitudes.array() *= (-step * (v_shifted + g * rho)).exp();
      kinetic.forward(psi.amplitudes, work);
      work.array() *= half_kin;
      kinetic.inverse(work, psi.amplitudes);
      psi.normalize();
    }
    residual = stationary_residual(psi, potential.values, g, kinetic);
    if (!std::isfinite(residual)) throw SolverError("ground state diverged");
    // Splitting error saturates the residual at O(step^2); refine the step then.
    if (residual > opt.tolerance && residual > 0.98 * last_checked) {
      step *= 0.5;
      if (step < opt.min_step) {
        throw SolverError("ground state stalled: residual " + format_double(residual) + " at minimum step");
      }
      half_kin = (-0.5 * step * kinetic.spectrum().array()).exp();
    }
    last_checked = residual;
  }
  GroundState out{psi, chemical_potential(psi, potential.values, g, kinetic), residual, it};
  return out;
}

PotentialSnapshot isolate_trap(const PotentialSnapshot& snapshot, const TrapGeometry& geometry, std::size_t index,
                               double kinetic_coefficient) {
  if (index >= geometry.size()) throw DomainError("isolate_trap: trap index out of range");
  PotentialSnapshot out = snapshot;
  const double omega = geometry.curvatures[index];
  const double stiffness = omega * omega / (2.0 * kinetic_coefficient);  // V'' of the trap
  auto extend = [&](double boundary, bool right_side) {
    // Continue from the barrier top with the trap's own curvature.
    const double v_b = potential_at_position(snapshot, boundary);
    for (Eigen::Index i = 0; i < out.x.size(); ++i) {
      const double x = out.x(i);
      if ((right_side && x > boundary) || (!right_side && x < boundary)) {
        out.values(i) = v_b + 0.5 * stiffness * (x - boundary) * (x - boundary);
      }
    }
  };
  if (index > 0) extend(geometry.barrier_positions[index - 1], false);
  if (index + 1 < geometry.size()) extend(geometry.barrier_positions[index], true);
  return out;
}

Populations trap_populations(const Wavefunction& psi, const TrapGeometry& geometry) {
  if (geometry.size() != 3 || geometry.barrier_positions.size() != 2) {
    throw DomainError("trap_populations: geometry must contain exactly three traps");
  }
  const double b0 = geometry.barrier_positions[0];
  const double b1 = geometry.barrier_positions[1];
  const Eigen::VectorXd x = psi.grid.positions();
  Populations p{0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double rho = std::norm(psi.amplitudes(i));
    if (x(i) < b0) {
      p[0] += rho;
    } else if (x(i) < b1) {
      p[1] += rho;
    } else {
      p[2] += rho;
    }
  }
  for (double& v : p) v *= psi.grid.dx();
  return p;
}

double RunRecord::norm_drift() const {
  double drift = 0.0;
  for (double n : norms) drift = std::max(drift, std::fabs(n - norms.front()));
  return drift;
}

// ---------------------------------------------------------------------------

RunRecord propagate(const Wavefunction& psi0, const PotentialFunction& potential, const PropagationOptions& opt) {
  const Grid1D& grid = psi0.grid;
  grid.validate();
  if (psi0.amplitudes.size() != grid.n_points) throw DomainError("propagate: wavefunction/grid size mismatch");
  if (std::fabs(psi0.norm() - 1.0) > 1e-12) throw DomainError("propagate: initial state must be normalised");
  if (!(opt.dt > 0.0)) throw ConfigError("solver.dt", "time step must be positive");
  const double span = opt.t_end - opt.t_start;
  if (span == 0.0) throw ConfigError("solver", "empty propagation interval");

  SpectralKinetic kinetic(grid, opt.kinetic_coefficient);
  const long n_steps = static_cast<long>(std::ceil(std::fabs(span) / opt.dt - 1e-9));
  const double dt = span / static_cast<double>(n_steps);
  const double phase = std::fabs(dt) * kinetic.max_energy();
  if (phase >= opt.stability_limit) {
    throw ConfigError("solver.dt", "time step violates the stability rule: dt * E_max = " + format_double(phase) +
                                       " rad >= " + format_double(opt.stability_limit));
  }
  const double drift_limit = opt.norm_drift_limit.value_or(opt.g == 0.0 ? 1e-9 : 1e-6);

  // Sample step indices, uniformly spaced and strictly increasing.
  const std::size_t n_samples = std::max<std::size_t>(2, std::min<std::size_t>(opt.n_samples, n_steps + 1));
  std::vector<long> sample_steps(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    sample_steps[k] = std::lround(static_cast<double>(k) * static_cast<double>(n_steps) /
                                  static_cast<double>(n_samples - 1));
  }
  std::vector<long> snapshot_steps;
  for (double ts : opt.snapshot_times) {
    const double frac = (ts - opt.t_start) / span;
    if (frac < -1e-12 || frac > 1.0 + 1e-12) throw DomainError("propagate: snapshot time outside run");
    snapshot_steps.push_back(std::lround(frac * static_cast<double>(n_steps)));
  }

  RunRecord rec;
  rec.metadata = RunMetadata{dt, n_steps, grid, opt.g, opt.kinetic_coefficient, phase};
  rec.populations.resize(static_cast<Eigen::Index>(n_samples), 3);
  rec.populations.setZero();

  const Eigen::VectorXd x = grid.positions();
  Eigen::VectorXd v(grid.n_points);
  std::optional<TrapGeometry> last_geometry;

  auto record_sample = [&](long step, const Wavefunction& psi) {
    const double t = opt.t_start + dt * static_cast<double>(step);
    const Eigen::Index row = static_cast<Eigen::Index>(rec.times.size());
    potential(t, v);
    rec.times.push_back(t);
    rec.norms.push_back(psi.norm());
    rec.chemical_potentials.push_back(chemical_potential(psi, v, opt.g, kinetic));
    const double edge = std::max(std::norm(psi.amplitudes(0)), std::norm(psi.amplitudes(grid.n_points - 1)));
    if (edge > opt.edge_density_limit) {
      throw SolverError("density " + format_double(edge) + " at the domain edge at step " + std::to_string(step) +
                        "; enlarge the grid");
    }
    bool fallback = false;
    if (opt.track_populations) {
      try {
        PotentialSnapshot snap{x, v, Branch::upper};
        last_geometry = trap_geometry(snap, opt.expected_traps, opt.kinetic_coefficient);
      } catch (const GeometryError&) {
        fallback = true;
      }
      if (last_geometry && last_geometry->size() == 3) {
        const Populations p = trap_populations(psi, *last_geometry);
        rec.populations.row(row) << p[0], p[1], p[2];
      }
    }
    rec.geometry_fallback.push_back(fallback);
    for (std::size_t k = 0; k < snapshot_steps.size(); ++k) {
      if (snapshot_steps[k] == step) rec.snapshots.emplace_back(t, psi);
    }
  };

  Wavefunction psi = psi0;
  record_sample(0, psi);
  std::size_t next_sample = 1;

  const Eigen::ArrayXcd half_kin =
      (kinetic.spectrum().array() * cd(0.0, -0.5 * dt)).exp();
  const Eigen::ArrayXcd full_kin = half_kin * half_kin;

  Eigen::VectorXcd psi_k;
  kinetic.forward(psi.amplitudes, psi_k);
  psi_k.array() *= half_kin;
  Wavefunction sample{grid, Eigen::VectorXcd(grid.n_points)};
  Eigen::VectorXcd tmp;

  for (long step = 0; step < n_steps; ++step) {
    kinetic.inverse(psi_k, psi.amplitudes);
    const double t_mid = opt.t_start + dt * (static_cast<double>(step) + 0.5);
    potential(t_mid, v);
    Eigen::ArrayXd phase_arr = v.array();
    if (opt.g != 0.0) phase_arr += opt.g * psi.amplitudes.cwiseAbs2().array();
    psi.amplitudes.array() *= (phase_arr * cd(0.0, -dt)).exp();
    const double nrm = psi.amplitudes.squaredNorm();
    if (!std::isfinite(nrm)) throw SolverError("non-finite wavefunction at step " + std::to_string(step));
    kinetic.forward(psi.amplitudes, psi_k);

    const long done = step + 1;
    if (next_sample < n_samples && sample_steps[next_sample] == done) {
      tmp = psi_k.array() * half_kin;
      kinetic.inverse(tmp, sample.amplitudes);
      record_sample(done, sample);
      while (next_sample < n_samples && sample_steps[next_sample] == done) ++next_sample;
    }
    psi_k.array() *= (done == n_steps ? half_kin : full_kin);
  }
  kinetic.inverse(psi_k, psi.amplitudes);
  rec.final_state = psi;

  const double drift = rec.norm_drift();
  if (drift > drift_limit) {
    throw SolverError("norm drift " + format_double(drift) + " exceeds " + format_double(drift_limit));
  }
  return rec;
}

RunRecord propagate(const Wavefunction& psi0, const CtapSchedule& schedule, const PotentialFunction& potential,
                    double g, double dt, std::size_t n_samples, double kinetic_coefficient) {
  PropagationOptions opt;
  opt.t_start = 0.0;
  opt.t_end = schedule.total_T;
  opt.dt = dt;
  opt.g = g;
  opt.n_samples = n_samples;
  opt.kinetic_coefficient = kinetic_coefficient;
  opt.snapshot_times = {0.0, 0.5 * schedule.total_T, schedule.total_T};
  return propagate(psi0, potential, opt);
}

void write_run_csv(std::ostream& os, const RunRecord& r, const UnitScaling& s) {
  os << "t_s,P_L,P_M,P_R,norm,mu_J\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    os << format_double(r.times[i] * s.time_s) << ',' << format_double(r.populations(row, 0)) << ','
       << format_double(r.populations(row, 1)) << ',' << format_double(r.populations(row, 2)) << ','
       << format_double(r.norms[i]) << ',' << format_double(r.chemical_potentials[i] * s.energy_J) << '\n';
  }
}

void write_wavefunction_csv(std::ostream& os, const Wavefunction& psi, const UnitScaling& s) {
  os << "x_m,re_psi,im_psi,density\n";
  const Eigen::VectorXd x = psi.grid.positions();
  const double amp = 1.0 / std::sqrt(s.length_m);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const cd a = psi.amplitudes(i) * amp;
    os << format_double(x(i) * s.length_m) << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << ','
       << format_double(std::norm(a)) << '\n';
  }
}

}  // namespace ctap
