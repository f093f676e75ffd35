#include "ctap/three_level.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>

#include "ctap/csv.hpp"

namespace ctap {

void Couplings::validate() const {
  if (!(J_LM >= 0.0) || !(J_MR >= 0.0) || !std::isfinite(J_LM) || !std::isfinite(J_MR)) {
    throw DomainError("couplings must be finite and non-negative");
  }
}

double mixing_angle(const Couplings& c) {
  c.validate();
  if (c.J_LM == 0.0 && c.J_MR == 0.0) throw DomainError("mixing angle undefined for vanishing couplings");
  return std::atan2(c.J_LM, c.J_MR);
}

ThreeState dark_state(const Couplings& c) {
  const double theta = mixing_angle(c);
  return ThreeState(std::cos(theta), 0.0, -std::sin(theta));
}

double pulse_envelope(PulseShape shape, double t, double center, double width) {
  if (!(width > 0.0)) throw DomainError("pulse width must be positive");
  const double u = (t - center) / width;
  switch (shape) {
    case PulseShape::raised_cosine:
      return std::fabs(u) < 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * u)) : 0.0;
    case PulseShape::gaussian:
      return std::exp(-0.5 * u * u);
  }
  return 0.0;
}

CouplingFunction PulsePair::couplings() const {
  if (!(total_T > 0.0)) throw DomainError("pulse pair: total time must be positive");
  if (!(peak >= 0.0)) throw DomainError("pulse pair: peak must be non-negative");
  const PulsePair p = *this;
  const double early = 0.5 * (p.total_T - p.delay);
  const double late = 0.5 * (p.total_T + p.delay);
  return [p, early, late](double t) {
    const double a = p.peak * pulse_envelope(p.shape, t, early, p.width);
    const double b = p.peak * pulse_envelope(p.shape, t, late, p.width);
    return p.counter_intuitive ? Couplings{b, a} : Couplings{a, b};
  };
}

double ThreeLevelRecord::norm_drift() const {
  double d = 0.0;
  for (double n : norms) d = std::max(d, std::fabs(n - norms.front()));
  return d;
}

ThreeLevelRecord integrate(const CouplingFunction& couplings, const OnSiteFunction& on_site, const ThreeState& psi0,
                           double total_T, const IntegrateOptions& opt) {
  if (!(total_T > 0.0)) throw DomainError("integrate: total time must be positive");
  if (!(opt.dt > 0.0)) throw ConfigError("three_level.dt", "time step must be positive");
  if (std::fabs(psi0.squaredNorm() - 1.0) > 1e-12) throw DomainError("integrate: initial state must be normalised");

  const long n_steps = static_cast<long>(std::ceil(total_T / opt.dt - 1e-9));
  const double dt = total_T / static_cast<double>(n_steps);
  const std::size_t n_samples = std::max<std::size_t>(2, std::min<std::size_t>(opt.n_samples, n_steps + 1));
  const Eigen::Vector3d p0 = populations(psi0);
  const std::complex<double> minus_i(0.0, -1.0);

  auto h_at = [&](double t, const ThreeState& c) {
    const Couplings j = couplings(t);
    const OnSiteEnergies e = on_site ? on_site(t, opt.self_consistent ? populations(c) : p0) : OnSiteEnergies{};
    return hamiltonian(j, e);
  };
  auto rhs = [&](double t, const ThreeState& c) -> ThreeState {
    return minus_i * (h_at(t, c).cast<std::complex<double>>() * c);
  };

  ThreeLevelRecord rec;
  rec.populations.resize(static_cast<Eigen::Index>(n_samples), 3);
  std::size_t next = 0;
  auto sample = [&](long step, const ThreeState& c) {
    const long target = std::lround(static_cast<double>(next) * static_cast<double>(n_steps) /
                                    static_cast<double>(n_samples - 1));
    if (next >= n_samples || target != step) return;
    rec.times.push_back(dt * static_cast<double>(step));
    rec.populations.row(static_cast<Eigen::Index>(next)) = populations(c).transpose();
    rec.norms.push_back(c.squaredNorm());
    ++next;
  };

  ThreeState c = psi0;
  sample(0, c);
  for (long step = 0; step < n_steps; ++step) {
    const double t = dt * static_cast<double>(step);
    const double bound = dt * h_at(t, c).cwiseAbs().rowwise().sum().maxCoeff();
    if (bound >= opt.stability_limit) {
      throw ConfigError("three_level.dt", "dt * ||H|| = " + format_double(bound) + " exceeds the stability limit");
    }
    const ThreeState k1 = rhs(t, c);
    const ThreeState k2 = rhs(t + 0.5 * dt, c + 0.5 * dt * k1);
    const ThreeState k3 = rhs(t + 0.5 * dt, c + 0.5 * dt * k2);
    const ThreeState k4 = rhs(t + dt, c + dt * k3);
    c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!c.allFinite()) throw SolverError("three-level state became non-finite");
    sample(step + 1, c);
  }
  rec.final_state = c;
  return rec;
}

ThreeLevelRecord integrate(const CouplingFunction& couplings, const ThreeState& psi0, double total_T,
                           const IntegrateOptions& options) {
  return integrate(couplings, OnSiteFunction{}, psi0, total_T, options);
}

Eigen::VectorXd lowest_levels(const PotentialSnapshot& s, Eigen::Index count, double kinetic_coefficient) {
  const Eigen::Index n = s.x.size();
  if (n < 3 || count < 1 || count > n) throw DomainError("lowest_levels: bad grid or count");
  const double dx = s.dx();
  const double t = kinetic_coefficient / (dx * dx);
  Eigen::VectorXd diag = s.values.array() + 2.0 * t;
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -t);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("tridiagonal eigensolver failed");
  return solver.eigenvalues().head(count);
}

namespace {

double interpolate(const PotentialSnapshot& s, double x) {
  const double u = std::clamp((x - s.x(0)) / s.dx(), 0.0, static_cast<double>(s.x.size() - 1));
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(u), s.x.size() - 2);
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * s.values(i) + f * s.values(i + 1);
}

double stiffness(const TrapGeometry& g, std::size_t i, double kappa) {
  return g.curvatures[i] * g.curvatures[i] / (2.0 * kappa);
}

// Keeps [lo, hi] and continues quadratically outside it.
PotentialSnapshot restrict_to(const PotentialSnapshot& s, std::optional<double> lo, double k_lo,
                              std::optional<double> hi, double k_hi) {
  PotentialSnapshot out = s;
  const double v_lo = lo ? interpolate(s, *lo) : 0.0;
  const double v_hi = hi ? interpolate(s, *hi) : 0.0;
  for (Eigen::Index i = 0; i < s.x.size(); ++i) {
    const double x = s.x(i);
    if (lo && x < *lo) out.values(i) = v_lo + 0.5 * k_lo * (x - *lo) * (x - *lo);
    if (hi && x > *hi) out.values(i) = v_hi + 0.5 * k_hi * (x - *hi) * (x - *hi);
  }
  return out;
}

}  // namespace

DoubletSplitting tunneling_extract(const PotentialSnapshot& s, const TrapGeometry& g, std::size_t left,
                                   double kappa) {
  if (left + 1 >= g.size() || g.barrier_positions.size() + 1 != g.size()) {
    throw ExtractionError("tunneling_extract: wells " + std::to_string(left) + " and " + std::to_string(left + 1) +
                          " not resolved");
  }
  const std::size_t right = left + 1;
  std::optional<double> outer_lo;
  std::optional<double> outer_hi;
  if (left > 0) outer_lo = g.barrier_positions[left - 1];
  if (right + 1 < g.size()) outer_hi = g.barrier_positions[right];
  const double middle = g.barrier_positions[left];
  const double k_l = stiffness(g, left, kappa);
  const double k_r = stiffness(g, right, kappa);

  const Eigen::VectorXd pair = lowest_levels(restrict_to(s, outer_lo, k_l, outer_hi, k_r), 3, kappa);
  const double e_l = lowest_levels(restrict_to(s, outer_lo, k_l, middle, k_l), 1, kappa)(0);
  const double e_r = lowest_levels(restrict_to(s, middle, k_r, outer_hi, k_r), 1, kappa)(0);

  DoubletSplitting d;
  d.splitting = pair(1) - pair(0);
  d.band_gap = pair(2) - pair(1);
  d.detuning = e_l - e_r;
  if (!(d.band_gap > d.splitting)) {
    throw ExtractionError("lowest doublet is not separated from the next level (gap " + format_double(d.band_gap) +
                          ", splitting " + format_double(d.splitting) + ")");
  }
  d.J = 0.5 * std::sqrt(std::max(0.0, d.splitting * d.splitting - d.detuning * d.detuning));
  return d;
}

Couplings tunneling_extract(const PotentialSnapshot& s, const TrapGeometry& g, double kappa) {
  if (g.size() != 3) throw ExtractionError("tunneling_extract: expected three traps");
  return Couplings{tunneling_extract(s, g, 0, kappa).J, tunneling_extract(s, g, 1, kappa).J};
}

void write_three_level_csv(std::ostream& os, const ThreeLevelRecord& r, double time_scale) {
  os << "t,P_L,P_M,P_R\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    os << format_double(r.times[i] * time_scale) << ',' << format_double(r.populations(row, 0)) << ','
       << format_double(r.populations(row, 1)) << ',' << format_double(r.populations(row, 2)) << '\n';
  }
}

void write_couplings_csv(std::ostream& os, const CouplingTrace& trace, double time_scale, double frequency_scale) {
  os << "t,J_LM,J_MR\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    os << format_double(trace.times[i] * time_scale) << ',' << format_double(trace.couplings[i].J_LM * frequency_scale)
       << ',' << format_double(trace.couplings[i].J_MR * frequency_scale) << '\n';
  }
}

}  // namespace ctap
