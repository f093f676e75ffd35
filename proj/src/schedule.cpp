#include "ctap/schedule.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "ctap/csv.hpp"

namespace ctap {

double ramp_value(const RampFunction& ramp, double t) {
  if (t < 0.0 || t > ramp.duration) return 0.0;
  return 0.5 * ramp.peak * (1.0 - std::cos(2.0 * std::numbers::pi * t / ramp.duration));
}

double ramp_derivative(const RampFunction& ramp, double t) {
  if (t < 0.0 || t > ramp.duration) return 0.0;
  const double w = 2.0 * std::numbers::pi / ramp.duration;
  return 0.5 * ramp.peak * w * std::sin(w * t);
}

double ramp_peak_for_spacing(double initial_spacing, double closest_spacing) {
  if (!(closest_spacing > 0.0) || !(closest_spacing < initial_spacing)) {
    throw DomainError("closest spacing must lie in (0, initial spacing)");
  }
  return 2.0 * (initial_spacing - closest_spacing);
}

std::pair<double, double> detuning_values(const DetuningProfile& p, double t, double total_T) {
  if (!(total_T > 0.0)) throw DomainError("detuning_values: total time must be positive");
  const double arg = 2.0 * p.kappa * (t - 0.5 * total_T);
  // (1 -/+ tanh(y))/2 written as logistic functions to avoid cancellation.
  return {p.delta_omega0 / (1.0 + std::exp(arg)), p.delta_omega0 / (1.0 + std::exp(-arg))};
}

namespace {

double heaviside(double t) { return t >= 0.0 ? 1.0 : 0.0; }

std::string time_string(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", t);
  return buf;
}

}  // namespace

ScheduleError::ScheduleError(double t, const std::string& what)
    : SolverError("schedule at t=" + time_string(t) + ": " + what), t_(t) {}

CtapSchedule CtapSchedule::make(const CombFrequencies& initial, double tau, double total_T, PulseOrder mode,
                                double ramp_peak, std::optional<DetuningProfile> detuning) {
  CtapSchedule s;
  s.initial_omegas = initial;
  s.tau = tau;
  s.total_T = total_T;
  s.mode = mode;
  s.ramp = RampFunction{ramp_peak, total_T - tau, RampShape::cosine};
  s.detuning = detuning;
  s.validate();
  return s;
}

void CtapSchedule::validate() const {
  if (!(tau > 0.0) || !(tau < total_T)) throw DomainError("schedule: need 0 < tau < T");
  if (std::fabs(ramp.duration - (total_T - tau)) > 1e-12 * total_T) {
    throw DomainError("schedule: ramp duration must equal T - tau");
  }
  if (!(ramp.peak >= 0.0)) throw DomainError("schedule: ramp peak must be non-negative");
  const double spacing = initial_omegas[2] - initial_omegas[1];
  for (std::size_t n = 2; n + 1 < kCombSize; ++n) {
    const double d = initial_omegas[n + 1] - initial_omegas[n];
    if (std::fabs(d - spacing) > 1e-9 * std::fabs(spacing)) {
      throw DomainError("schedule: lines 2..6 must be uniformly spaced initially");
    }
  }
  if (!(initial_omegas[1] > initial_omegas[0]) || !(spacing > 0.0)) {
    throw DomainError("schedule: initial comb must be increasing");
  }
  if (!(ramp.peak < 2.0 * spacing)) {
    throw DomainError("schedule: ramp peak would make comb lines cross");
  }
  if (detuning && !(detuning->kappa >= 0.0)) throw DomainError("schedule: kappa must be non-negative");
}

CombFrequencies frequencies_at(const CtapSchedule& s, double t) {
  const double lead = ramp_value(s.ramp, t);
  const double lag = ramp_value(s.ramp, t - s.tau) * heaviside(t - s.tau);
  // The counter-intuitive order moves the right trap first.
  const double right = s.mode == PulseOrder::counter_intuitive ? lead : lag;
  const double middle = s.mode == PulseOrder::counter_intuitive ? lag : lead;

  CombFrequencies w = s.initial_omegas;
  w[2] = w[2] - 0.5 * middle;
  w[3] = w[3] - middle;
  w[4] = w[4] - 0.5 * right - middle;
  w[5] = w[5] - right - middle;
  if (s.detuning) {
    const auto [d2, d6] = detuning_values(*s.detuning, t, s.total_T);
    w[1] = w[1] - d2;
    w[5] = w[5] + d6;
  }
  for (std::size_t n = 1; n < kCombSize; ++n) {
    if (!(w[n] > w[n - 1])) {
      throw ScheduleError(t, "comb lines " + std::to_string(n) + " and " + std::to_string(n + 1) + " cross");
    }
  }
  return w;
}

CombFrequencies frequency_rates_at(const CtapSchedule& s, double t) {
  const double lead = ramp_derivative(s.ramp, t);
  const double lag = ramp_derivative(s.ramp, t - s.tau) * heaviside(t - s.tau);
  const double right = s.mode == PulseOrder::counter_intuitive ? lead : lag;
  const double middle = s.mode == PulseOrder::counter_intuitive ? lag : lead;
  CombFrequencies r{};
  r[2] = -0.5 * middle;
  r[3] = -middle;
  r[4] = -0.5 * right - middle;
  r[5] = -right - middle;
  if (s.detuning) {
    const double y = s.detuning->kappa * (t - 0.5 * s.total_T);
    const double c = std::cosh(y);
    const double rate = 0.5 * s.detuning->delta_omega0 * s.detuning->kappa / (c * c);
    r[1] += rate;  // -d/dt of a decreasing step
    r[5] += rate;
  }
  return r;
}

void write_schedule_csv(std::ostream& os, const CtapSchedule& schedule, std::size_t samples, double time_scale,
                        double frequency_scale) {
  os << "t_s,w1_rad_s,w2_rad_s,w3_rad_s,w4_rad_s,w5_rad_s,w6_rad_s\n";
  const std::size_t n = samples < 2 ? 2 : samples;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = schedule.total_T * static_cast<double>(i) / static_cast<double>(n - 1);
    const auto w = frequencies_at(schedule, t);
    os << format_double(t * time_scale);
    for (double v : w) os << ',' << format_double(v * frequency_scale);
    os << '\n';
  }
}

}  // namespace ctap
