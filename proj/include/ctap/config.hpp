#ifndef CTAP_CONFIG_HPP
#define CTAP_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctap/rf_potential.hpp"
#include "ctap/schedule.hpp"
#include "ctap/three_level.hpp"
#include "ctap/units.hpp"

// Experiment configuration. Every physical input is SI with the unit in the
// key name; all frequencies are angular (rad/s). Missing keys take the
// defaults below, which are the reference parameter set of the model.

namespace ctap {

struct GridConfig {
  Eigen::Index n_points = 1024;
  std::optional<double> x_min_m;
  std::optional<double> x_max_m;
  // Without explicit bounds: [x(w2) - p d, x(w6) + p d], d the resonance
  // distance between lines 2 and 3 at t = 0.
  double padding_spacings = 1.0;
};

struct SolverConfig {
  std::optional<double> dt_s;        // default: 0.9 of the stability bound
  double stability_limit_rad = 0.1;
  double ground_state_tolerance = 1e-8;
  double edge_density_limit = 1e-12;
  std::optional<double> norm_drift_limit;
  std::optional<double> omega_ref_rad_s;  // default: measured left-trap frequency
};

struct ScheduleConfig {
  double total_T_s = 0.11;
  double tau_s = 0.0055;
  PulseOrder mode = PulseOrder::counter_intuitive;
  double closest_spacing_rad_s = 2e5 * 2.0 * 3.14159265358979323846;
  bool detuning_enabled = false;
  double kappa_per_s = 0.0;
  double delta_omega0_rad_s = 1.5e3 * 2.0 * 3.14159265358979323846;
};

struct InteractionConfig {
  // Either g1d_J_m directly or the (n_atoms, a_s_m, a_perp_m) triple.
  std::optional<double> g1d_J_m;
  double n_atoms = 0.0;
  double a_s_m = 5.3e-9;
  double a_perp_m = 1.3e-7;
};

struct OutputConfig {
  std::size_t samples = 500;
  double potential_time_s = 0.0;
  std::size_t coupling_samples = 0;  // J(t) trace points in ctap runs; 0 disables
  std::vector<double> snapshot_fractions{0.0, 0.5, 1.0};
};

struct ThreeLevelConfig {
  double total_T_s = 1.0;
  double peak_coupling_rad_s = 50.0;
  double delay_s = 0.1;
  double width_s = 0.4;
  PulseShape shape = PulseShape::raised_cosine;
  PulseOrder mode = PulseOrder::counter_intuitive;
  double dt_s = 1e-4;
  std::array<double, 3> on_site_rad_s{0.0, 0.0, 0.0};
  bool self_consistent = false;
  // Per-site shift proportional to the site population: eps_i += mu_i P_i.
  std::array<double, 3> mu_rad_s{0.0, 0.0, 0.0};
};

enum class SweepVariable { g_1d, kappa, T, delta_omega0 };

struct SweepConfig {
  SweepVariable variable = SweepVariable::g_1d;
  std::vector<double> values;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ExperimentConfig {
  AtomSpecies species = AtomSpecies::rubidium87();
  double gradient_T_per_m = 2.13;
  std::vector<double> comb_omegas_rad_s;
  double rabi_rad_s = 2.0 * 3.14159265358979323846 * 5e4;
  Branch branch = Branch::upper;
  double stitch_tolerance = kDefaultStitchTolerance;
  ScheduleConfig schedule;
  InteractionConfig interaction;
  GridConfig grid;
  SolverConfig solver;
  OutputConfig output;
  ThreeLevelConfig three_level;
  SweepConfig sweep;

  ExperimentConfig();

  // Effective configuration as canonical JSON text.
  std::string canonical() const;
  // FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
  double g1d_J_m() const;
};

/// Parses JSON text, applying `overrides` ("dotted.path=value", value parsed
/// as JSON when possible, otherwise taken as a string) before validation.
/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Checks every cross-module precondition that does not need numerics.
void validate(const ExperimentConfig& cfg);

std::string to_string(PulseOrder mode);
std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

std::uint64_t fnv1a(const std::string& text);

}  // namespace ctap

#endif  // CTAP_CONFIG_HPP
