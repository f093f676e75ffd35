#include "ctap/rf_potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ctap/csv.hpp"

namespace ctap {

void MagneticField::validate() const {
  if (!(gradient_T_per_m > 0.0) || !std::isfinite(gradient_T_per_m)) {
    throw DomainError("magnetic field gradient must be positive");
  }
}

void RfComb::validate() const {
  if (omegas_rad_s.empty()) throw DomainError("rf comb is empty");
  if (!(rabi_rad_s > 0.0) || !std::isfinite(rabi_rad_s)) {
    throw DomainError("rf comb Rabi frequency must be positive");
  }
  for (std::size_t i = 0; i < omegas_rad_s.size(); ++i) {
    if (!(omegas_rad_s[i] > 0.0) || !std::isfinite(omegas_rad_s[i])) {
      throw DomainError("rf comb frequency " + std::to_string(i) + " must be positive");
    }
    if (i > 0 && !(omegas_rad_s[i] - omegas_rad_s[i - 1] > 2.0 * rabi_rad_s)) {
      throw DomainError("rf comb frequencies " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " are not increasing with spacing above twice the Rabi frequency");
    }
  }
}

double rabi_frequency(const AtomSpecies& species, const Eigen::Vector3d& b_rf, const Eigen::Vector3d& e_B) {
  if (std::fabs(e_B.norm() - 1.0) > 1e-12) throw DomainError("rabi_frequency: e_B must be a unit vector");
  species.validate();
  const double clebsch = species.F * (species.F + 1.0) - species.m_F * species.m_F_prime;
  if (clebsch < 0.0) throw DomainError("rabi_frequency: negative angular-momentum factor");
  return PhysicalConstants::mu_B * std::fabs(species.g_F) / (4.0 * PhysicalConstants::hbar) *
         b_rf.cross(e_B).norm() * std::sqrt(clebsch);
}

DressedModel<double> make_dressed_model(const MagneticField& field, const RfComb& comb,
                                        const AtomSpecies& species, const UnitScaling& scaling) {
  field.validate();
  comb.validate();
  species.validate();
  const double slope_si = PhysicalConstants::mu_B * std::fabs(species.g_F) * field.gradient_T_per_m;
  const double slope = slope_si * scaling.length_m / scaling.energy_J;
  // hbar*omega / E = omega * time_scale because E * t = hbar.
  Eigen::VectorXd levels =
      Eigen::Map<const Eigen::VectorXd>(comb.omegas_rad_s.data(), comb.omegas_rad_s.size()) * scaling.time_s;
  return DressedModel<double>(slope, comb.rabi_rad_s * scaling.time_s, std::move(levels));
}

void set_comb_frequencies(DressedModel<double>& model, const Eigen::Ref<const Eigen::VectorXd>& omegas_rad_s,
                          const UnitScaling& scaling) {
  if (omegas_rad_s.size() != model.size()) throw DomainError("set_comb_frequencies: size mismatch");
  model.set_levels(omegas_rad_s * scaling.time_s);
}

void evaluate_potential(const Eigen::Ref<const Eigen::VectorXd>& x, const DressedModel<double>& m,
                        Branch branch, Eigen::Ref<Eigen::VectorXd> out) {
  if (out.size() != x.size()) throw DomainError("evaluate_potential: output size mismatch");
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = potential_at(x(i), m, branch);
}

std::vector<StitchJump> stitching_jumps(const DressedModel<double>& m, Branch branch, double x_lo,
                                        double x_hi) {
  std::vector<StitchJump> jumps;
  for (Eigen::Index n = 0; n + 1 < m.size(); ++n) {
    const double xb = 0.5 * (m.levels(n) + m.levels(n + 1)) / m.slope;
    if (xb < x_lo || xb > x_hi) continue;
    const double left = window_potential(xb, n, m, branch);
    const double right = window_potential(xb, n + 1, m, branch);
    jumps.push_back({n, xb, right - left});
  }
  return jumps;
}

namespace {

std::string describe_jump(const StitchJump& j, double tolerance) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "potential discontinuity %.3e at window boundary %ld|%ld (x = %.6g) exceeds tolerance %.3e",
                j.jump, static_cast<long>(j.lower_window), static_cast<long>(j.lower_window + 1), j.position,
                tolerance);
  return buf;
}

}  // namespace

StitchingError::StitchingError(const StitchJump& j, double tolerance)
    : SolverError(describe_jump(j, tolerance)), jump_(j) {}

PotentialSnapshot adiabatic_potential(const Eigen::Ref<const Eigen::VectorXd>& x, const DressedModel<double>& m,
                                      Branch branch, double stitch_tolerance) {
  if (x.size() < 2) throw DomainError("adiabatic_potential: grid needs at least two points");
  const double tol = stitch_tolerance * m.coupling;
  for (const auto& j : stitching_jumps(m, branch, x(0), x(x.size() - 1))) {
    if (std::fabs(j.jump) > tol) throw StitchingError(j, tol);
  }
  PotentialSnapshot snap;
  snap.x = x;
  snap.values.resize(x.size());
  snap.branch = branch;
  evaluate_potential(x, m, branch, snap.values);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(snap.values(i))) throw SolverError("adiabatic_potential: non-finite value");
  }
  return snap;
}

namespace {

struct Extremum {
  double position;
  double value;
  double second_derivative;
};

// Vertex of the parabola through (i-1, i, i+1).
Extremum refine(const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::Index i) {
  const double dx = x(1) - x(0);
  const double a = v(i - 1), b = v(i), c = v(i + 1);
  const double curv = a - 2.0 * b + c;
  if (curv == 0.0) return {x(i), b, 0.0};
  const double shift = 0.5 * (a - c) / curv;
  return {x(i) + shift * dx, b - 0.125 * (c - a) * (c - a) / curv, curv / (dx * dx)};
}

double prominence(const Eigen::VectorXd& v, Eigen::Index i) {
  const Eigen::Index n = v.size();
  double left = v(i), right = v(i);
  for (Eigen::Index k = i - 1; k >= 0; --k) {
    if (v(k) < v(i)) break;
    left = std::max(left, v(k));
  }
  for (Eigen::Index k = i + 1; k < n; ++k) {
    if (v(k) < v(i)) break;
    right = std::max(right, v(k));
  }
  return std::min(left, right) - v(i);
}

}  // namespace

TrapGeometry trap_geometry(const PotentialSnapshot& snapshot, std::optional<std::size_t> count,
                           double kinetic_coefficient) {
  const auto& x = snapshot.x;
  const auto& v = snapshot.values;
  const Eigen::Index n = v.size();
  if (n < 3) throw GeometryError("trap_geometry: need at least three grid points");

  std::vector<Eigen::Index> candidates;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    // Strict on the left, non-strict on the right: one hit per flat-bottomed plateau.
    if (v(i) < v(i - 1) && v(i) <= v(i + 1)) candidates.push_back(i);
  }
  std::vector<double> prom(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) prom[k] = prominence(v, candidates[k]);

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  if (count) {
    if (candidates.size() < *count) {
      throw GeometryError("trap_geometry: found " + std::to_string(candidates.size()) + " minima, " +
                          std::to_string(*count) + " requested");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prom[a] > prom[b]; });
    order.resize(*count);
    std::sort(order.begin(), order.end());
  }

  TrapGeometry g;
  std::vector<Eigen::Index> kept;
  for (std::size_t k : order) {
    const Eigen::Index i = candidates[k];
    const Extremum e = refine(x, v, i);
    g.minima_positions.push_back(e.position);
    g.minima_values.push_back(e.value);
    g.curvatures.push_back(std::sqrt(std::max(0.0, 2.0 * kinetic_coefficient * e.second_derivative)));
    g.prominences.push_back(prom[k]);
    kept.push_back(i);
  }
  for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
    Eigen::Index imax = kept[k];
    for (Eigen::Index i = kept[k]; i <= kept[k + 1]; ++i) {
      if (v(i) > v(imax)) imax = i;
    }
    double pos = x(imax), val = v(imax);
    if (imax > 0 && imax + 1 < n) {
      const Extremum e = refine(x, v, imax);
      pos = e.position;
      val = e.value;
    }
    g.barrier_positions.push_back(pos);
    g.barrier_heights.push_back(std::max(0.0, val - std::max(g.minima_values[k], g.minima_values[k + 1])));
  }
  return g;
}

void write_potential_csv(std::ostream& os, const PotentialSnapshot& snapshot, const UnitScaling& scaling) {
  os << "x_m,V_J\n";
  for (Eigen::Index i = 0; i < snapshot.x.size(); ++i) {
    os << format_double(snapshot.x(i) * scaling.length_m) << ',' << format_double(snapshot.values(i) * scaling.energy_J)
       << '\n';
  }
}

}  // namespace ctap
