#include "ctap/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ctap/csv.hpp"

namespace ctap {

double transfer_fidelity(const RunRecord& record) {
  if (record.size() == 0) throw DomainError("transfer_fidelity: empty record");
  return record.final_right();
}

SensitivityResult sensitivity_probe(const ExperimentConfig& base, double delta) {
  if (!(delta >= 0.0) || delta > 0.2) throw DomainError("sensitivity_probe: delta must lie in [0, 0.2]");
  SensitivityResult r;
  if (delta == 0.0) return r;
  auto final_right = [&](double factor) {
    ExperimentConfig c = base;
    c.schedule.total_T_s *= factor;
    return transfer_fidelity(make_experiment(c).run());
  };
  r.base = final_right(1.0);
  r.minus = final_right(1.0 - delta);
  r.plus = final_right(1.0 + delta);
  r.max_change = std::max(std::fabs(r.minus - r.base), std::fabs(r.plus - r.base));
  return r;
}

ExperimentConfig with_sweep_value(const ExperimentConfig& base, SweepVariable variable, double value) {
  ExperimentConfig c = base;
  switch (variable) {
    case SweepVariable::g_1d:
      c.interaction.g1d_J_m = value;
      break;
    case SweepVariable::kappa:
      c.schedule.detuning_enabled = true;
      c.schedule.kappa_per_s = value;
      break;
    case SweepVariable::T:
      c.schedule.total_T_s = value;
      break;
    case SweepVariable::delta_omega0:
      c.schedule.detuning_enabled = true;
      c.schedule.delta_omega0_rad_s = value;
      break;
  }
  return c;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
}

const SweepRow& SweepResult::best() const {
  const SweepRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.ok() && (!best || r.P_R > best->P_R)) best = &r;
  }
  if (!best) throw SolverError("sweep: every row failed");
  return *best;
}

SweepResult run_sweep(const ExperimentConfig& base, SweepVariable variable, const std::vector<double>& values,
                      unsigned threads) {
  if (values.empty()) throw ConfigError("sweep.values", "must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ConfigError("sweep.values", "must be finite");
    if (i > 0 && !(values[i] > values[i - 1])) throw ConfigError("sweep.values", "must be strictly increasing");
  }
  SweepResult result;
  result.variable = variable;
  result.rows.resize(values.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepRow& row = result.rows[i];
      row.value = values[i];
      try {
        const RunRecord rec = make_experiment(with_sweep_value(base, variable, values[i])).run();
        const auto last = rec.populations.row(rec.populations.rows() - 1);
        row.P_L = last(0);
        row.P_M = last(1);
        row.P_R = last(2);
        row.norm = rec.norms.back();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "value,P_L,P_M,P_R,loss,error\n";
  for (const auto& r : result.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << format_double(r.value) << ',' << format_double(r.P_L) << ',' << format_double(r.P_M) << ','
       << format_double(r.P_R) << ',' << format_double(r.loss()) << ',' << err << '\n';
  }
}

std::vector<LandauZenerEntry> landau_zener_diagnostic(const CtapSchedule& schedule, double rabi_rad_s,
                                                      std::size_t samples, double threshold) {
  if (!(rabi_rad_s > 0.0)) throw DomainError("landau_zener_diagnostic: Rabi frequency must be positive");
  if (samples < 2) throw DomainError("landau_zener_diagnostic: need at least two samples");
  std::vector<LandauZenerEntry> out(kCombSize);
  for (std::size_t n = 0; n < kCombSize; ++n) out[n].line = n;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = schedule.total_T * static_cast<double>(i) / static_cast<double>(samples - 1);
    const CombFrequencies r = frequency_rates_at(schedule, t);
    for (std::size_t n = 0; n < kCombSize; ++n) out[n].max_rate = std::max(out[n].max_rate, std::fabs(r[n]));
  }
  for (auto& e : out) {
    if (e.max_rate > 0.0) e.ratio = rabi_rad_s * rabi_rad_s / e.max_rate;
    e.flagged = e.ratio < threshold;
  }
  return out;
}

double interaction_shift(const Experiment& e, double g) {
  const PotentialSnapshot s = e.potential_at(0.0);
  const PotentialSnapshot iso = isolate_trap(s, trap_geometry(s, 3, e.kinetic), 0, e.kinetic);
  GroundStateOptions opt;
  opt.tolerance = e.config.solver.ground_state_tolerance;
  const double e0 = ground_state_imaginary_time(iso, 0.0, e.kinetic, opt).mu;
  return ground_state_imaginary_time(iso, g, e.kinetic, opt).mu - e0;
}

double g1d_for_shift(const Experiment& e, double target, double rel_tol) {
  if (!(target > 0.0)) throw DomainError("g1d_for_shift: target must be positive");
  double lo = 0.0;
  double hi = target;  // the shift grows roughly linearly in g with slope below one
  for (int k = 0; interaction_shift(e, hi) < target; ++k) {
    if (k > 60) throw SolverError("g1d_for_shift: could not bracket the target");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (interaction_shift(e, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) * e.scaling.energy_J * e.scaling.length_m;
}

}  // namespace ctap
