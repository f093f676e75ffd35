#ifndef CTAP_RF_POTENTIAL_HPP
#define CTAP_RF_POTENTIAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctap/errors.hpp"
#include "ctap/units.hpp"

namespace ctap {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Linear quadrupole field along x, B(x) = b x.
struct MagneticField {
  double gradient_T_per_m;
  void validate() const;
};

/// Radio-frequency comb: strictly increasing angular frequencies (rad/s)
/// sharing one Rabi frequency.
struct RfComb {
  std::vector<double> omegas_rad_s;
  double rabi_rad_s;

  // Ordering, positivity, and adjacent spacing > 2 * rabi.
  void validate() const;
};

enum class Branch { upper, lower };

// Default stitching tolerance in units of hbar*Omega. See README for why this
// is not tighter: the window formula is continuous only to first order in
// Omega/Delta.
inline constexpr double kDefaultStitchTolerance = 0.1;

// Off-resonant detunings below this fraction of hbar*Omega count as singular.
inline constexpr double kDefaultSingularFloor = 0.5;

/// Rabi frequency (rad/s) of a linearly polarised rf field `b_rf` (tesla)
/// against a static field along the unit vector `e_B`.
double rabi_frequency(const AtomSpecies& species, const Eigen::Vector3d& b_rf,
                      const Eigen::Vector3d& e_B);

/// The dressed-state model in dimensionless units.
///
/// levels(n) holds hbar*omega_n and coupling holds hbar*Omega, both in
/// energy units; slope is mu_B |g_F| b in energy per length unit, so the
/// bare detuning from comb line n at position x is slope*x - levels(n).
template <typename Scalar = double>
struct DressedModel {
  Scalar slope{};
  Scalar coupling{};
  Scalar singular_floor{};
  VectorX<Scalar> levels;
  // offsets(n) = sum_{k<n} (-1)^(k+1) levels(k), the window baseline
  // with zero-based n.
  VectorX<Scalar> offsets;

  DressedModel() = default;
  DressedModel(Scalar slope_, Scalar coupling_, VectorX<Scalar> levels_)
      : slope(slope_),
        coupling(coupling_),
        singular_floor(Scalar(kDefaultSingularFloor) * coupling_) {
    set_levels(std::move(levels_));
  }

  void set_levels(VectorX<Scalar> new_levels) {
    levels = std::move(new_levels);
    offsets.resize(levels.size());
    Scalar acc(0);
    for (Eigen::Index n = 0; n < levels.size(); ++n) {
      offsets(n) = acc;
      acc += (n % 2 == 0 ? Scalar(-1) : Scalar(1)) * levels(n);
    }
  }

  Eigen::Index size() const { return levels.size(); }
  Scalar resonance_position(Eigen::Index n) const { return levels(n) / slope; }
  Scalar detuning(Scalar x, Eigen::Index n) const { return slope * x - levels(n); }

  template <typename Other>
  DressedModel<Other> cast() const {
    DressedModel<Other> out;
    out.slope = Other(slope);
    out.coupling = Other(coupling);
    out.singular_floor = Other(singular_floor);
    out.set_levels(levels.template cast<Other>());
    return out;
  }
};

/// Builds the dimensionless model from SI inputs.
DressedModel<double> make_dressed_model(const MagneticField& field, const RfComb& comb,
                                        const AtomSpecies& species, const UnitScaling& scaling);

/// Replaces the comb frequencies (rad/s) of an existing model, keeping slope
/// and coupling.
void set_comb_frequencies(DressedModel<double>& model, const Eigen::Ref<const Eigen::VectorXd>& omegas_rad_s,
                          const UnitScaling& scaling);

/// Index of the comb line closest to resonance at x; ties go to the lower index.
template <typename Scalar>
Eigen::Index nearest_resonance_index(Scalar x, const DressedModel<Scalar>& m) {
  if (m.size() == 0) throw DomainError("nearest_resonance_index: empty comb");
  using std::abs;
  Eigen::Index best = 0;
  Scalar best_abs = abs(m.detuning(x, 0));
  for (Eigen::Index n = 1; n < m.size(); ++n) {
    const Scalar d = abs(m.detuning(x, n));
    if (d < best_abs) {
      best_abs = d;
      best = n;
    }
  }
  return best;
}

/// Summed Stark shift of every comb line except n.
template <typename Scalar>
Scalar stark_sum(Scalar x, Eigen::Index n, const DressedModel<Scalar>& m) {
  if (n < 0 || n >= m.size()) throw DomainError("stark_sum: comb index out of range");
  using std::abs;
  const Scalar c2 = m.coupling * m.coupling;
  Scalar sum(0);
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    if (j == n) continue;
    const Scalar d = m.detuning(x, j);
    if (abs(d) < m.singular_floor) {
      throw DomainError("stark_sum: off-resonant line " + std::to_string(j) +
                        " within the singular floor (comb too dense)");
    }
    sum += c2 / (Scalar(4) * d);
  }
  return sum;
}

/// Stark-corrected two-level eigenvalues (E_plus, E_minus) in window n.
template <typename Scalar>
std::pair<Scalar, Scalar> dressed_eigenvalues(Scalar x, Eigen::Index n, const DressedModel<Scalar>& m) {
  using std::sqrt;
  const Scalar shifted = m.detuning(x, n) + Scalar(2) * stark_sum(x, n, m);
  const Scalar e = Scalar(0.5) * sqrt(m.coupling * m.coupling + shifted * shifted);
  return {e, -e};
}

/// Adiabatic potential evaluated with the formula of window n, whether or not
/// n is the nearest line at x. Used for stitching checks.
template <typename Scalar>
Scalar window_potential(Scalar x, Eigen::Index n, const DressedModel<Scalar>& m, Branch branch) {
  const Scalar e_plus = dressed_eigenvalues(x, n, m).first;
  // (-1)^(n+1) with one-based n+1.
  const Scalar parity = (n % 2 == 0) ? Scalar(-1) : Scalar(1);
  const Scalar upper = parity * (e_plus - m.levels(n) / Scalar(2)) - m.offsets(n);
  return branch == Branch::upper ? upper : -upper;
}

template <typename Scalar>
Scalar potential_at(Scalar x, const DressedModel<Scalar>& m, Branch branch) {
  return window_potential(x, nearest_resonance_index(x, m), m, branch);
}

/// Pointwise potential on a sorted grid, without stitching checks.
void evaluate_potential(const Eigen::Ref<const Eigen::VectorXd>& x, const DressedModel<double>& m,
                        Branch branch, Eigen::Ref<Eigen::VectorXd> out);

struct StitchJump {
  Eigen::Index lower_window;  // boundary between lower_window and lower_window + 1
  double position;
  double jump;  // V(right window) - V(left window), energy units
};

// Jumps at every window boundary inside [x_lo, x_hi].
std::vector<StitchJump> stitching_jumps(const DressedModel<double>& m, Branch branch, double x_lo,
                                        double x_hi);

class StitchingError : public SolverError {
 public:
  StitchingError(const StitchJump& j, double tolerance);
  const StitchJump& boundary() const noexcept { return jump_; }

 private:
  StitchJump jump_;
};

/// Potential on a uniform grid, dimensionless positions and energies.
struct PotentialSnapshot {
  Eigen::VectorXd x;
  Eigen::VectorXd values;
  Branch branch = Branch::upper;

  double dx() const { return x.size() > 1 ? x(1) - x(0) : 0.0; }
};

/// Evaluates the stitched adiabatic potential on `x` and rejects it if any
/// window boundary inside the grid jumps by more than
/// stitch_tolerance * hbar*Omega.
PotentialSnapshot adiabatic_potential(const Eigen::Ref<const Eigen::VectorXd>& x,
                                      const DressedModel<double>& m, Branch branch,
                                      double stitch_tolerance = kDefaultStitchTolerance);

struct TrapGeometry {
  std::vector<double> minima_positions;
  std::vector<double> minima_values;
  std::vector<double> curvatures;  // local harmonic angular frequency
  std::vector<double> prominences;
  std::vector<double> barrier_positions;  // between adjacent minima
  std::vector<double> barrier_heights;    // relative to the higher neighbour

  std::size_t size() const { return minima_positions.size(); }
};

class GeometryError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Locates minima by sign change of the first difference, refined with a
/// three-point parabola. With `count`, keeps the `count` most prominent
/// minima (throws GeometryError if fewer exist); otherwise keeps all.
/// `kinetic_coefficient` is hbar^2/(2 m L^2 E), 0.5 in oscillator units.
TrapGeometry trap_geometry(const PotentialSnapshot& snapshot, std::optional<std::size_t> count = {},
                           double kinetic_coefficient = 0.5);

// CSV with columns x_m, V_J.
void write_potential_csv(std::ostream& os, const PotentialSnapshot& snapshot, const UnitScaling& scaling);

}  // namespace ctap

#endif  // CTAP_RF_POTENTIAL_HPP
