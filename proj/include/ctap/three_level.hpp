#ifndef CTAP_THREE_LEVEL_HPP
#define CTAP_THREE_LEVEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ctap/errors.hpp"
#include "ctap/rf_potential.hpp"
#include "ctap/units.hpp"

// Reduced three-trap models with hbar = 1: couplings and on-site energies are
// angular frequencies in whatever time unit the caller uses.

namespace ctap {

struct Couplings {
  double J_LM = 0.0;
  double J_MR = 0.0;
  void validate() const;
};

struct OnSiteEnergies {
  double eps_L = 0.0;
  double eps_M = 0.0;
  double eps_R = 0.0;
};

// Amplitudes (c_L, c_M, c_R).
using ThreeState = Eigen::Vector3cd;

template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 3> hamiltonian(Scalar j_lm, Scalar j_mr, Scalar eps_l = Scalar(0), Scalar eps_m = Scalar(0),
                                        Scalar eps_r = Scalar(0)) {
  Eigen::Matrix<Scalar, 3, 3> h;
  h << eps_l, -j_lm, Scalar(0),
       -j_lm, eps_m, -j_mr,
       Scalar(0), -j_mr, eps_r;
  return h;
}

inline Eigen::Matrix3d hamiltonian(const Couplings& c, const OnSiteEnergies& e = {}) {
  return hamiltonian<double>(c.J_LM, c.J_MR, e.eps_L, e.eps_M, e.eps_R);
}

// atan2(J_LM, J_MR) in [0, pi/2]. Throws DomainError if both vanish.
double mixing_angle(const Couplings& c);

// cos(theta)|L> - sin(theta)|R>.
ThreeState dark_state(const Couplings& c);

inline Eigen::Vector3d populations(const ThreeState& s) { return s.cwiseAbs2(); }

using CouplingFunction = std::function<Couplings(double t)>;
// On-site energies at time t. `populations` is the initial population vector
// unless self-consistent feedback is enabled, in which case it is the current one.
using OnSiteFunction = std::function<OnSiteEnergies(double t, const Eigen::Vector3d& populations)>;

enum class PulseShape { raised_cosine, gaussian };

/// Single pulse of unit height centred at `center`. Raised cosine: support
/// |t - center| < width. Gaussian: standard deviation `width`.
double pulse_envelope(PulseShape shape, double t, double center, double width);

struct PulsePair {
  double peak = 0.0;   // angular frequency
  double total_T = 1.0;
  double delay = 0.1;  // separation of the two pulse centres
  double width = 0.4;  // see pulse_envelope
  PulseShape shape = PulseShape::raised_cosine;
  bool counter_intuitive = true;  // J_MR leads

  CouplingFunction couplings() const;
};

struct IntegrateOptions {
  double dt = 1e-4;
  std::size_t n_samples = 500;
  double stability_limit = 0.1;  // dt * ||H|| bound
  bool self_consistent = false;
};

struct ThreeLevelRecord {
  std::vector<double> times;
  Eigen::Matrix<double, Eigen::Dynamic, 3> populations;
  std::vector<double> norms;
  ThreeState final_state;

  double final_right() const { return populations(populations.rows() - 1, 2); }
  double max_middle() const { return populations.col(1).maxCoeff(); }
  double norm_drift() const;
};

/// Classic fixed-step RK4 for i dc/dt = H(t) c over [0, T]. Throws
/// ConfigError when dt ||H(t)||_inf reaches the stability limit.
ThreeLevelRecord integrate(const CouplingFunction& couplings, const OnSiteFunction& on_site, const ThreeState& psi0,
                           double total_T, const IntegrateOptions& options = {});

ThreeLevelRecord integrate(const CouplingFunction& couplings, const ThreeState& psi0, double total_T,
                           const IntegrateOptions& options = {});

class ExtractionError : public SolverError {
 public:
  using SolverError::SolverError;
};

struct DoubletSplitting {
  double J = 0.0;          // coupling, energy units of the snapshot
  double splitting = 0.0;  // E1 - E0
  double detuning = 0.0;   // difference of the isolated-well ground energies
  double band_gap = 0.0;   // E2 - E1
};

/// Tunnel coupling between traps `left` and `left + 1` from the lowest
/// doublet of the two-well restriction, diagonalised as a finite-difference
/// tridiagonal matrix. The detuning of the two wells is removed using their
/// separately isolated ground energies: J = sqrt(dE^2 - delta^2) / 2.
DoubletSplitting tunneling_extract(const PotentialSnapshot& snapshot, const TrapGeometry& geometry,
                                   std::size_t left, double kinetic_coefficient = 0.5);

// Both couplings of a three-trap snapshot.
Couplings tunneling_extract(const PotentialSnapshot& snapshot, const TrapGeometry& geometry,
                            double kinetic_coefficient = 0.5);

// Lowest `count` eigenvalues of -kappa d^2/dx^2 + V with hard walls at the
// ends of the snapshot.
Eigen::VectorXd lowest_levels(const PotentialSnapshot& snapshot, Eigen::Index count,
                              double kinetic_coefficient = 0.5);

struct CouplingTrace {
  std::vector<double> times;
  std::vector<Couplings> couplings;
};

// Columns t, P_L, P_M, P_R. `time_scale` converts to SI seconds.
void write_three_level_csv(std::ostream& os, const ThreeLevelRecord& r, double time_scale = 1.0);
// Columns t, J_LM, J_MR (rad/s with the given scales).
void write_couplings_csv(std::ostream& os, const CouplingTrace& trace, double time_scale = 1.0,
                         double frequency_scale = 1.0);

}  // namespace ctap

#endif  // CTAP_THREE_LEVEL_HPP
