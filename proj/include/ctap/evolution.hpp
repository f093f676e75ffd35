#ifndef CTAP_EVOLUTION_HPP
#define CTAP_EVOLUTION_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "ctap/rf_potential.hpp"
#include "ctap/schedule.hpp"
#include "ctap/units.hpp"

namespace ctap {

/// Uniform periodic grid: x_i = x_min + i dx, dx = (x_max - x_min) / n_points.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  Eigen::Index n_points = 256;

  // x_max > x_min, n_points a power of two and at least 256.
  void validate() const;
  double dx() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double length() const { return x_max - x_min; }
  Eigen::VectorXd positions() const;
  // FFT-ordered angular wavenumbers.
  Eigen::VectorXd wavenumbers() const;
  double max_wavenumber() const;
};

struct Wavefunction {
  Grid1D grid;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.squaredNorm() * grid.dx(); }
  Eigen::VectorXd density() const { return amplitudes.cwiseAbs2(); }
  void normalize();
};

// Normalised Gaussian exp(-(x-x0)^2/(2 sigma^2) + i k0 x).
Wavefunction gaussian_wavefunction(const Grid1D& grid, double center, double sigma, double k0 = 0.0);

// |<a|b>|, assuming equal grids.
double overlap(const Wavefunction& a, const Wavefunction& b);

/// Transverse-confinement data for the effective 1D coupling.
struct InteractionParams {
  double n_atoms = 0.0;
  double a_s_m = 0.0;
  double a_perp_m = 0.0;
};

inline constexpr double kConfinementConstant = 1.4603;

/// 4 N hbar^2 a_s / (m a_perp) / (a_perp - C a_s), in J m. Throws
/// DomainError at or beyond the confinement-induced resonance.
double g1d_from_atoms(const InteractionParams& params, const AtomSpecies& species);

// g [J m] -> dimensionless g / (E L).
inline double g1d_to_dimensionless(double g_si, const UnitScaling& s) { return g_si / (s.energy_J * s.length_m); }

/// FFT-based kinetic operator -kappa d^2/dx^2 on a periodic grid.
class SpectralKinetic {
 public:
  SpectralKinetic(const Grid1D& grid, double kinetic_coefficient);
  ~SpectralKinetic();
  SpectralKinetic(SpectralKinetic&&) noexcept;
  SpectralKinetic& operator=(SpectralKinetic&&) noexcept;

  const Grid1D& grid() const { return grid_; }
  double coefficient() const { return kappa_; }
  // kappa * k^2 in FFT order.
  const Eigen::VectorXd& spectrum() const { return spectrum_; }
  double max_energy() const;

  void forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  void inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  // out = T psi.
  void apply(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;

 private:
  struct Impl;
  Grid1D grid_;
  double kappa_;
  Eigen::VectorXd spectrum_;
  std::unique_ptr<Impl> impl_;
};

/// mu = <psi| T + V + g|psi|^2 |psi> / <psi|psi>.
double chemical_potential(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                          const SpectralKinetic& kinetic);
/// E = <T + V> + (g/2) int |psi|^4, per unit norm.
double energy_functional(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                         const SpectralKinetic& kinetic);
/// || (H_GP - mu) psi || with the L2 norm on the grid.
double stationary_residual(const Wavefunction& psi, const Eigen::VectorXd& potential, double g,
                           const SpectralKinetic& kinetic);

struct GroundStateOptions {
  double tolerance = 1e-8;
  double initial_step = 0.02;
  double min_step = 1e-6;
  long max_iterations = 2'000'000;
  long check_interval = 100;
  std::optional<double> center;  // defaults to the deepest minimum
  std::optional<double> width;   // defaults to the locally fitted oscillator width
};

struct GroundState {
  Wavefunction psi;
  double mu = 0.0;
  double residual = 0.0;
  long iterations = 0;
};

/// Imaginary-time split-step with renormalisation every step; the step is
/// halved whenever the residual stagnates.
GroundState ground_state_imaginary_time(const PotentialSnapshot& potential, double g, double kinetic_coefficient,
                                        const GroundStateOptions& options = {});

/// Copy of `snapshot` with trap `index` kept between its neighbouring
/// barrier maxima and continued quadratically beyond them.
PotentialSnapshot isolate_trap(const PotentialSnapshot& snapshot, const TrapGeometry& geometry, std::size_t index,
                               double kinetic_coefficient = 0.5);

using Populations = std::array<double, 3>;

/// Integrated density left of the first barrier, between the barriers, and
/// right of the second barrier.
Populations trap_populations(const Wavefunction& psi, const TrapGeometry& geometry);

// Fills `values` with the potential at time t.
using PotentialFunction = std::function<void(double t, Eigen::Ref<Eigen::VectorXd> values)>;

struct PropagationOptions {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;  // magnitude; the sign follows t_end - t_start
  double g = 0.0;
  double kinetic_coefficient = 0.5;
  std::size_t n_samples = 500;
  std::vector<double> snapshot_times;
  bool track_populations = true;
  std::size_t expected_traps = 3;
  double stability_limit = 0.1;       // max radians per step at the kinetic cutoff
  double edge_density_limit = 1e-12;  // density at the two outermost grid points
  std::optional<double> norm_drift_limit;  // 1e-9 linear, 1e-6 with g != 0
};

struct RunMetadata {
  double dt = 0.0;
  long n_steps = 0;
  Grid1D grid;
  double g = 0.0;
  double kinetic_coefficient = 0.5;
  double max_phase_per_step = 0.0;
};

struct RunRecord {
  std::vector<double> times;
  Eigen::Matrix<double, Eigen::Dynamic, 3> populations;
  std::vector<double> norms;
  std::vector<double> chemical_potentials;
  std::vector<bool> geometry_fallback;
  Wavefunction final_state;
  std::vector<std::pair<double, Wavefunction>> snapshots;
  RunMetadata metadata;

  std::size_t size() const { return times.size(); }
  double final_right() const { return populations(populations.rows() - 1, 2); }
  double max_middle() const { return populations.col(1).maxCoeff(); }
  double norm_drift() const;
};

/// Symmetric split-step propagation: half kinetic step in Fourier space, full
/// potential-plus-nonlinearity step at the step midpoint, half kinetic step.
RunRecord propagate(const Wavefunction& psi0, const PotentialFunction& potential, const PropagationOptions& options);

// Populations with three traps resolved from the potential at each sample
// time, over [0, schedule.total_T].
RunRecord propagate(const Wavefunction& psi0, const CtapSchedule& schedule, const PotentialFunction& potential,
                    double g, double dt, std::size_t n_samples, double kinetic_coefficient = 0.5);

// Columns t_s, P_L, P_M, P_R, norm, mu_J.
void write_run_csv(std::ostream& os, const RunRecord& record, const UnitScaling& scaling);
// Columns x_m, re_psi, im_psi, density (SI: m^-1/2 and m^-1).
void write_wavefunction_csv(std::ostream& os, const Wavefunction& psi, const UnitScaling& scaling);

}  // namespace ctap

#endif  // CTAP_EVOLUTION_HPP
