#ifndef CTAP_EXPERIMENT_HPP
#define CTAP_EXPERIMENT_HPP

#include <string>
#include <utility>
#include <vector>

#include "ctap/config.hpp"
#include "ctap/evolution.hpp"
#include "ctap/rf_potential.hpp"
#include "ctap/schedule.hpp"
#include "ctap/three_level.hpp"

namespace ctap {

/// A validated configuration turned into dimensionless numerics.
///
/// The schedule stays in SI (seconds, rad/s); everything on the grid is in
/// oscillator units of `scaling`. All potentials are shifted by the constant
/// `v_ref`, the bottom of the t = 0 potential on the grid, which only changes
/// the global phase.
struct Experiment {
  ExperimentConfig config;
  UnitScaling scaling{};
  double omega_ref = 0.0;  // rad/s
  double kinetic = 0.5;
  DressedModel<double> model;
  CtapSchedule schedule;
  Grid1D grid;
  double g = 0.0;
  double dt = 0.0;
  double v_ref = 0.0;

  // Comb and model at SI time t_s.
  DressedModel<double> model_at(double t_s) const;
  // Shifted potential at dimensionless time t, checked for stitching.
  PotentialSnapshot potential_at(double t) const;
  TrapGeometry geometry_at(double t) const;
  PotentialFunction potential_function() const;

  GroundState initial_state() const;
  PropagationOptions propagation_options() const;
  RunRecord run() const;
  RunRecord run(const Wavefunction& psi0) const;

  // Tunnel couplings at `n` uniformly spaced times; NaN where the traps are
  // not resolvable.
  CouplingTrace coupling_trace(std::size_t n) const;

  double time_s(double t) const { return t * scaling.time_s; }
  double to_time(double t_s) const { return t_s / scaling.time_s; }

  // "# key=value" entries for output headers.
  std::vector<std::pair<std::string, std::string>> metadata() const;
};

/// Measures the left-trap frequency at t = 0 (unless solver.omega_ref_rad_s
/// is set), builds oscillator units from it, and lays out the grid.
Experiment make_experiment(const ExperimentConfig& config);

// Reduced-model run described by config.three_level.
ThreeLevelRecord run_three_level(const ThreeLevelConfig& config);

}  // namespace ctap

#endif  // CTAP_EXPERIMENT_HPP
