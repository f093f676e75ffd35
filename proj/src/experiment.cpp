#include "ctap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctap/csv.hpp"

namespace ctap {

namespace {

CombFrequencies to_comb(const std::vector<double>& v) {
  CombFrequencies w{};
  std::copy(v.begin(), v.end(), w.begin());
  return w;
}

Eigen::VectorXd as_vector(const CombFrequencies& w) { return Eigen::Map<const Eigen::VectorXd>(w.data(), kCombSize); }

}  // namespace

DressedModel<double> Experiment::model_at(double t_s) const {
  DressedModel<double> m = model;
  set_comb_frequencies(m, as_vector(frequencies_at(schedule, t_s)), scaling);
  return m;
}

PotentialSnapshot Experiment::potential_at(double t) const {
  PotentialSnapshot s = adiabatic_potential(grid.positions(), model_at(time_s(t)), config.branch,
                                            config.stitch_tolerance);
  s.values.array() -= v_ref;
  return s;
}

TrapGeometry Experiment::geometry_at(double t) const { return trap_geometry(potential_at(t), 3, kinetic); }

PotentialFunction Experiment::potential_function() const {
  const Eigen::VectorXd x = grid.positions();
  // Captured by value so the function outlives this object.
  return [self = *this, x](double t, Eigen::Ref<Eigen::VectorXd> values) {
    evaluate_potential(x, self.model_at(self.time_s(t)), self.config.branch, values);
    values.array() -= self.v_ref;
  };
}

GroundState Experiment::initial_state() const {
  const PotentialSnapshot s = potential_at(0.0);
  const TrapGeometry geo = trap_geometry(s, 3, kinetic);
  GroundStateOptions opt;
  opt.tolerance = config.solver.ground_state_tolerance;
  return ground_state_imaginary_time(isolate_trap(s, geo, 0, kinetic), g, kinetic, opt);
}

PropagationOptions Experiment::propagation_options() const {
  PropagationOptions opt;
  opt.t_start = 0.0;
  opt.t_end = to_time(schedule.total_T);
  opt.dt = dt;
  opt.g = g;
  opt.kinetic_coefficient = kinetic;
  opt.n_samples = config.output.samples;
  for (double f : config.output.snapshot_fractions) opt.snapshot_times.push_back(f * opt.t_end);
  opt.stability_limit = config.solver.stability_limit_rad;
  opt.edge_density_limit = config.solver.edge_density_limit;
  opt.norm_drift_limit = config.solver.norm_drift_limit;
  return opt;
}

RunRecord Experiment::run(const Wavefunction& psi0) const {
  return propagate(psi0, potential_function(), propagation_options());
}

RunRecord Experiment::run() const { return run(initial_state().psi); }

CouplingTrace Experiment::coupling_trace(std::size_t n) const {
  CouplingTrace trace;
  const double t_end = to_time(schedule.total_T);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
    Couplings c{nan, nan};
    try {
      const PotentialSnapshot s = potential_at(t);
      c = tunneling_extract(s, trap_geometry(s, 3, kinetic), kinetic);
    } catch (const SolverError&) {
      // left as NaN
    }
    trace.times.push_back(t);
    trace.couplings.push_back(c);
  }
  return trace;
}

std::vector<std::pair<std::string, std::string>> Experiment::metadata() const {
  const double e_max = kinetic * std::pow(grid.max_wavenumber(), 2);
  return {{"config_hash", config.hash()},
          {"omega_ref_rad_s", format_double(omega_ref)},
          {"length_scale_m", format_double(scaling.length_m)},
          {"time_scale_s", format_double(scaling.time_s)},
          {"energy_scale_J", format_double(scaling.energy_J)},
          {"grid_x_min_m", format_double(grid.x_min * scaling.length_m)},
          {"grid_x_max_m", format_double(grid.x_max * scaling.length_m)},
          {"grid_points", std::to_string(grid.n_points)},
          {"boundary", "periodic"},
          {"dt_s", format_double(dt * scaling.time_s)},
          {"steps", std::to_string(static_cast<long>(std::ceil(to_time(schedule.total_T) / dt - 1e-9)))},
          {"phase_per_step_rad", format_double(dt * e_max)},
          {"g1d_J_m", format_double(config.g1d_J_m())},
          {"potential_offset_J", format_double(v_ref * scaling.energy_J)}};
}

Experiment make_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  Experiment e;
  e.config = cfg;

  const MagneticField field{cfg.gradient_T_per_m};
  const RfComb comb{cfg.comb_omegas_rad_s, cfg.rabi_rad_s};
  const CombFrequencies initial = to_comb(cfg.comb_omegas_rad_s);
  const double spacing = initial[2] - initial[1];
  std::optional<DetuningProfile> detuning;
  if (cfg.schedule.detuning_enabled) {
    detuning = DetuningProfile{cfg.schedule.kappa_per_s, cfg.schedule.delta_omega0_rad_s};
  }
  try {
    e.schedule = CtapSchedule::make(initial, cfg.schedule.tau_s, cfg.schedule.total_T_s, cfg.schedule.mode,
                                    ramp_peak_for_spacing(spacing, cfg.schedule.closest_spacing_rad_s), detuning);
  } catch (const DomainError& err) {
    throw ConfigError("schedule", err.what());
  }

  const double slope_si = PhysicalConstants::mu_B * std::fabs(cfg.species.g_F) * cfg.gradient_T_per_m;
  auto resonance_m = [&](double omega) { return PhysicalConstants::hbar * omega / slope_si; };
  double x_min_m = 0.0;
  double x_max_m = 0.0;
  if (cfg.grid.x_min_m) {
    x_min_m = *cfg.grid.x_min_m;
    x_max_m = *cfg.grid.x_max_m;
  } else {
    const double pad = cfg.grid.padding_spacings * resonance_m(spacing);
    x_min_m = resonance_m(initial[1]) - pad;
    x_max_m = resonance_m(initial[5]) + pad;
  }

  auto build = [&](double omega_ref) {
    e.omega_ref = omega_ref;
    e.scaling = default_scaling(cfg.species, omega_ref);
    e.kinetic = e.scaling.kinetic_coefficient(cfg.species);
    e.model = make_dressed_model(field, comb, cfg.species, e.scaling);
    e.grid = Grid1D{x_min_m / e.scaling.length_m, x_max_m / e.scaling.length_m, cfg.grid.n_points};
    e.grid.validate();
    e.v_ref = 0.0;
    const PotentialSnapshot s0 = e.potential_at(0.0);
    e.v_ref = s0.values.minCoeff();
    return s0;
  };

  if (cfg.solver.omega_ref_rad_s) {
    build(*cfg.solver.omega_ref_rad_s);
  } else {
    // Provisional units from the Rabi frequency, then the measured left trap.
    const PotentialSnapshot s0 = build(cfg.rabi_rad_s);
    const TrapGeometry geo = trap_geometry(s0, 3, e.kinetic);
    build(geo.curvatures[0] * cfg.rabi_rad_s);
  }

  e.g = g1d_to_dimensionless(cfg.g1d_J_m(), e.scaling);
  const double e_max = e.kinetic * std::pow(e.grid.max_wavenumber(), 2);
  if (cfg.solver.dt_s) {
    e.dt = *cfg.solver.dt_s / e.scaling.time_s;
  } else {
    e.dt = 0.9 * cfg.solver.stability_limit_rad / e_max;
  }
  if (e.dt * e_max >= cfg.solver.stability_limit_rad) {
    throw ConfigError("solver.dt_s", "time step violates the stability rule: dt * E_max = " +
                                         format_double(e.dt * e_max) + " rad");
  }
  return e;
}

ThreeLevelRecord run_three_level(const ThreeLevelConfig& c) {
  PulsePair pulses;
  pulses.peak = c.peak_coupling_rad_s;
  pulses.total_T = c.total_T_s;
  pulses.delay = c.delay_s;
  pulses.width = c.width_s;
  pulses.shape = c.shape;
  pulses.counter_intuitive = c.mode == PulseOrder::counter_intuitive;
  const auto base = c.on_site_rad_s;
  const auto mu = c.mu_rad_s;
  OnSiteFunction on_site = [base, mu](double, const Eigen::Vector3d& p) {
    return OnSiteEnergies{base[0] + mu[0] * p(0), base[1] + mu[1] * p(1), base[2] + mu[2] * p(2)};
  };
  IntegrateOptions opt;
  opt.dt = c.dt_s;
  opt.self_consistent = c.self_consistent;
  return integrate(pulses.couplings(), on_site, ThreeState(1.0, 0.0, 0.0), c.total_T_s, opt);
}

}  // namespace ctap
