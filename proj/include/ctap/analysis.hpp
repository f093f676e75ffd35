#ifndef CTAP_ANALYSIS_HPP
#define CTAP_ANALYSIS_HPP

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "ctap/config.hpp"
#include "ctap/evolution.hpp"
#include "ctap/experiment.hpp"
#include "ctap/schedule.hpp"

namespace ctap {

// Final right-trap population.
double transfer_fidelity(const RunRecord& record);

struct SensitivityResult {
  double base = 0.0;
  double minus = 0.0;  // P_R at T (1 - delta)
  double plus = 0.0;   // P_R at T (1 + delta)
  double max_change = 0.0;
};

/// Reruns the experiment at T(1 - delta) and T(1 + delta) with tau fixed and
/// reports the largest change of the final P_R. delta = 0 returns zeros
/// without running anything.
SensitivityResult sensitivity_probe(const ExperimentConfig& base, double delta);

// Copy of `base` with the sweep variable set to `value` (SI units; g_1d in
// J m, kappa in 1/s, T in s, delta_omega0 in rad/s). kappa and delta_omega0
// switch the detuning on.
ExperimentConfig with_sweep_value(const ExperimentConfig& base, SweepVariable variable, double value);

struct SweepRow {
  double value = 0.0;
  double P_L = std::numeric_limits<double>::quiet_NaN();
  double P_M = std::numeric_limits<double>::quiet_NaN();
  double P_R = std::numeric_limits<double>::quiet_NaN();
  double norm = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
  double loss() const { return 1.0 - P_R; }
};

struct SweepResult {
  SweepVariable variable = SweepVariable::g_1d;
  std::vector<SweepRow> rows;

  std::size_t failures() const;
  // Row with the largest P_R among successful rows; throws if none.
  const SweepRow& best() const;
};

/// One full propagation per value, `threads` at a time (0: hardware
/// concurrency). Rows keep the order of `values`; a failing run records its
/// message and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& base, SweepVariable variable, const std::vector<double>& values,
                      unsigned threads = 0);

// Columns value, P_L, P_M, P_R, loss, error.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

struct LandauZenerEntry {
  std::size_t line = 0;  // zero-based comb index
  double max_rate = 0.0;  // max |d omega / dt|, rad/s^2
  double ratio = std::numeric_limits<double>::infinity();  // Omega^2 / max_rate
  bool flagged = false;
};

/// Adiabaticity of each comb line's resonance crossing: Omega^2 / |d omega_n/dt|
/// maximised over `samples` times. Static lines report an infinite ratio.
/// Ratios below `threshold` are flagged.
std::vector<LandauZenerEntry> landau_zener_diagnostic(const CtapSchedule& schedule, double rabi_rad_s,
                                                      std::size_t samples = 2001, double threshold = 10.0);

/// (mu - E0) / (hbar omega_ref) of the initial left-trap ground state for
/// dimensionless coupling g, where E0 is the linear ground energy.
double interaction_shift(const Experiment& experiment, double g);

/// Smallest g_1d (J m) whose interaction shift equals `target`, by bisection.
double g1d_for_shift(const Experiment& experiment, double target, double rel_tol = 1e-6);

}  // namespace ctap

#endif  // CTAP_ANALYSIS_HPP
