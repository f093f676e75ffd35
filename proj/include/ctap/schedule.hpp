#ifndef CTAP_SCHEDULE_HPP
#define CTAP_SCHEDULE_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <utility>

#include "ctap/errors.hpp"

// Frequency schedules are unit-agnostic: times and angular frequencies may be
// given in SI or in dimensionless units as long as they are consistent.

namespace ctap {

inline constexpr std::size_t kCombSize = 6;
using CombFrequencies = std::array<double, kCombSize>;

enum class RampShape { cosine };

/// Raised-cosine pulse f(t) = (peak/2)(1 - cos(2 pi t / duration)) on
/// [0, duration], zero elsewhere.
struct RampFunction {
  double peak = 0.0;
  double duration = 1.0;
  RampShape shape = RampShape::cosine;
};

double ramp_value(const RampFunction& ramp, double t);
double ramp_derivative(const RampFunction& ramp, double t);

// Ramp peak that brings an adjacent spacing from `initial_spacing` down to
// `closest_spacing`: each moving line pair closes its gaps by f/2.
double ramp_peak_for_spacing(double initial_spacing, double closest_spacing);

enum class PulseOrder { counter_intuitive, intuitive };

/// Tanh-shaped compensation of the outer traps, centred at T/2.
struct DetuningProfile {
  double kappa = 0.0;
  double delta_omega0 = 0.0;
};

// (d_omega2, d_omega6) at time t; their sum is delta_omega0.
std::pair<double, double> detuning_values(const DetuningProfile& profile, double t, double total_T);

struct CtapSchedule {
  CombFrequencies initial_omegas{};
  double tau = 0.0;
  double total_T = 1.0;
  PulseOrder mode = PulseOrder::counter_intuitive;
  RampFunction ramp;
  std::optional<DetuningProfile> detuning;

  // Builds a schedule whose ramp spans [0, total_T - tau].
  static CtapSchedule make(const CombFrequencies& initial, double tau, double total_T, PulseOrder mode,
                           double ramp_peak, std::optional<DetuningProfile> detuning = {});

  // 0 < tau < T, ramp duration T - tau, uniform spacing of lines 2..6,
  // and no comb crossing at the ramp peak.
  void validate() const;
};

class ScheduleError : public SolverError {
 public:
  ScheduleError(double t, const std::string& what);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// The six comb frequencies at time t. Throws ScheduleError if the comb is
/// not strictly increasing at t.
CombFrequencies frequencies_at(const CtapSchedule& schedule, double t);

/// Analytic time derivatives of frequencies_at.
CombFrequencies frequency_rates_at(const CtapSchedule& schedule, double t);

// Columns t_s, w1_rad_s..w6_rad_s. `time_scale` and `frequency_scale`
// convert the schedule's units to SI.
void write_schedule_csv(std::ostream& os, const CtapSchedule& schedule, std::size_t samples, double time_scale = 1.0,
                        double frequency_scale = 1.0);

}  // namespace ctap

#endif  // CTAP_SCHEDULE_HPP
