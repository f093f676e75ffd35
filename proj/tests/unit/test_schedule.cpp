#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ctap/schedule.hpp"

using namespace ctap;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

CombFrequencies reference_comb() {
  CombFrequencies w{};
  w[0] = kTwoPi * 1e6;
  for (std::size_t n = 1; n < kCombSize; ++n) w[n] = kTwoPi * 1e7 * static_cast<double>(n + 1);
  return w;
}

CtapSchedule reference_schedule(PulseOrder mode = PulseOrder::counter_intuitive,
                                std::optional<DetuningProfile> det = {}) {
  const double peak = ramp_peak_for_spacing(kTwoPi * 1e7, kTwoPi * 2e5);
  return CtapSchedule::make(reference_comb(), 0.0055, 0.11, mode, peak, det);
}

}  // namespace

TEST_CASE("ramp values") {
  const RampFunction r{3.0, 2.0, RampShape::cosine};
  CHECK(ramp_value(r, 0.0) == 0.0);
  CHECK(ramp_value(r, 1.0) == doctest::Approx(3.0));
  CHECK(ramp_value(r, 2.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(ramp_value(r, -0.1) == 0.0);
  CHECK(ramp_value(r, 2.1) == 0.0);
  for (int i = 0; i <= 100; ++i) CHECK(ramp_value(r, 0.02 * i) >= 0.0);
  // Central difference against the analytic rate.
  const double h = 1e-6;
  for (double t : {0.3, 0.9, 1.7}) {
    CHECK(ramp_derivative(r, t) == doctest::Approx((ramp_value(r, t + h) - ramp_value(r, t - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("ramp peak for the closest approach") {
  CHECK(ramp_peak_for_spacing(kTwoPi * 1e7, kTwoPi * 2e5) == doctest::Approx(2.0 * (1e7 - 2e5) * kTwoPi));
  CHECK_THROWS_AS(ramp_peak_for_spacing(1.0, 2.0), DomainError);
}

TEST_CASE("schedule endpoints and ordering") {
  const CtapSchedule s = reference_schedule();
  CHECK(frequencies_at(s, 0.0) == reference_comb());
  const auto early = frequencies_at(s, 0.5 * s.tau);
  CHECK(early[2] == reference_comb()[2]);
  CHECK(early[3] == reference_comb()[3]);
  CHECK(early[4] < reference_comb()[4]);
  CHECK(early[5] < reference_comb()[5]);
  const auto w = frequencies_at(s, 0.5 * (s.total_T - s.tau));
  CHECK(w[5] - w[4] == doctest::Approx(kTwoPi * 2e5).epsilon(1e-9));
  for (int i = 0; i <= 4000; ++i) {
    const auto v = frequencies_at(s, s.total_T * i / 4000.0);
    for (std::size_t n = 1; n < kCombSize; ++n) CHECK(v[n] > v[n - 1]);
    CHECK(v[0] == reference_comb()[0]);
  }
}

TEST_CASE("trap bottoms stay level") {
  // Bare bottoms of the three traps: w1 - w2/2, w1 - w2 + w3 - w4/2, ...
  const CtapSchedule s = reference_schedule();
  for (double t : {0.01, 0.03, 0.05, 0.08}) {
    const auto w = frequencies_at(s, t);
    const double left = w[0] - 0.5 * w[1];
    const double middle = w[0] - w[1] + w[2] - 0.5 * w[3];
    const double right = w[0] - w[1] + w[2] - w[3] + w[4] - 0.5 * w[5];
    CHECK(middle == doctest::Approx(left).epsilon(1e-12));
    CHECK(right == doctest::Approx(left).epsilon(1e-12));
  }
}

TEST_CASE("middle-right gap is the left-middle gap delayed by tau") {
  const CtapSchedule s = reference_schedule();
  for (int i = 0; i <= 200; ++i) {
    const double t = s.tau + (s.total_T - s.tau) * i / 200.0;
    const auto a = frequencies_at(s, t);
    const auto b = frequencies_at(s, t - s.tau);
    // The lagging pulse moves lines 3 and 4; the leading one lines 5 and 6.
    const double lag_gap = a[3] - a[2];
    const double lead_gap_earlier = (b[5] - b[4]);
    CHECK(lag_gap == doctest::Approx(lead_gap_earlier).epsilon(1e-12));
  }
}

TEST_CASE("intuitive order closes the left gap first") {
  const CtapSchedule ci = reference_schedule(PulseOrder::counter_intuitive);
  const CtapSchedule in = reference_schedule(PulseOrder::intuitive);
  const double t = 0.5 * ci.tau;
  const auto a = frequencies_at(ci, t);
  const auto b = frequencies_at(in, t);
  CHECK(a[3] - a[2] == doctest::Approx(kTwoPi * 1e7));
  CHECK(b[3] - b[2] < kTwoPi * 1e7);
  CHECK(b[5] - b[4] == doctest::Approx(kTwoPi * 1e7));
}

TEST_CASE("detuning values") {
  const DetuningProfile p{100.0, 7.0};
  const auto [a, b] = detuning_values(p, 0.055, 0.11);
  CHECK(a == doctest::Approx(3.5));
  CHECK(b == doctest::Approx(3.5));
  for (double t : {0.0, 0.02, 0.07, 0.11}) {
    const auto [d2, d6] = detuning_values(p, t, 0.11);
    CHECK(d2 + d6 == doctest::Approx(7.0).epsilon(1e-15));
  }
  const double d2 = detuning_values(p, 0.0, 0.11).first;
  CHECK(d2 == doctest::Approx(0.5 * (1.0 - std::tanh(-5.5)) * 7.0).epsilon(1e-14));
  CHECK(d2 / 7.0 == doctest::Approx(0.99998).epsilon(1e-5));
  const auto late = detuning_values(DetuningProfile{1e6, 7.0}, 0.0551, 0.11);
  CHECK(late.first < 1e-12);
  CHECK_THROWS_AS(detuning_values(p, 0.0, 0.0), DomainError);
}

TEST_CASE("zero detuning reproduces the plain schedule bitwise") {
  const CtapSchedule plain = reference_schedule();
  const CtapSchedule zero = reference_schedule(PulseOrder::counter_intuitive, DetuningProfile{50.0, 0.0});
  for (int i = 0; i <= 100; ++i) {
    const double t = plain.total_T * i / 100.0;
    CHECK(frequencies_at(plain, t) == frequencies_at(zero, t));
  }
}

TEST_CASE("detuned schedule moves only lines 2 and 6") {
  const CtapSchedule plain = reference_schedule();
  const CtapSchedule det = reference_schedule(PulseOrder::counter_intuitive, DetuningProfile{80.0, 1e4});
  const auto a = frequencies_at(plain, 0.03);
  const auto b = frequencies_at(det, 0.03);
  const auto [d2, d6] = detuning_values(*det.detuning, 0.03, det.total_T);
  CHECK(b[1] == doctest::Approx(a[1] - d2).epsilon(1e-15));
  CHECK(b[5] == doctest::Approx(a[5] + d6).epsilon(1e-15));
  CHECK(b[2] == a[2]);
  const double h = 1e-7;
  const auto r = frequency_rates_at(det, 0.03);
  const auto p = frequencies_at(det, 0.03 + h);
  const auto m = frequencies_at(det, 0.03 - h);
  for (std::size_t n = 0; n < kCombSize; ++n) {
    CHECK(r[n] == doctest::Approx((p[n] - m[n]) / (2 * h)).epsilon(1e-5).scale(1e3));
  }
}

TEST_CASE("schedule preconditions") {
  const double peak = ramp_peak_for_spacing(kTwoPi * 1e7, kTwoPi * 2e5);
  CHECK_THROWS_AS(CtapSchedule::make(reference_comb(), 0.2, 0.11, PulseOrder::counter_intuitive, peak), DomainError);
  CHECK_THROWS_AS(CtapSchedule::make(reference_comb(), 0.0, 0.11, PulseOrder::counter_intuitive, peak), DomainError);
  CombFrequencies uneven = reference_comb();
  uneven[4] += 1.0;
  CHECK_THROWS_AS(CtapSchedule::make(uneven, 0.01, 0.11, PulseOrder::counter_intuitive, peak), DomainError);
  CHECK_THROWS_AS(CtapSchedule::make(reference_comb(), 0.01, 0.11, PulseOrder::counter_intuitive, 2.5 * kTwoPi * 1e7),
                  DomainError);
}

TEST_CASE("a crossing comb names the time") {
  CtapSchedule s = reference_schedule();
  s.detuning = DetuningProfile{0.0, 6.0 * kTwoPi * 1e7};
  try {
    frequencies_at(s, 0.02);
    FAIL("expected a schedule error");
  } catch (const ScheduleError& e) {
    CHECK(e.time() == 0.02);
    CHECK(std::string(e.what()).find("t=0.02") != std::string::npos);
  }
}

TEST_CASE("schedule csv") {
  std::ostringstream os;
  write_schedule_csv(os, reference_schedule(), 3);
  const std::string text = os.str();
  CHECK(text.rfind("t_s,w1_rad_s,w2_rad_s,w3_rad_s,w4_rad_s,w5_rad_s,w6_rad_s\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
