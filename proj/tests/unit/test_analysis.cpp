#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ctap/analysis.hpp"
#include "ctap/errors.hpp"

using namespace ctap;

TEST_CASE("sweep value injection") {
  const ExperimentConfig base = parse_config("");
  CHECK(with_sweep_value(base, SweepVariable::g_1d, 3e-38).g1d_J_m() == 3e-38);
  const ExperimentConfig k = with_sweep_value(base, SweepVariable::kappa, 50.0);
  CHECK(k.schedule.detuning_enabled);
  CHECK(k.schedule.kappa_per_s == 50.0);
  CHECK(with_sweep_value(base, SweepVariable::T, 0.3).schedule.total_T_s == 0.3);
  CHECK(with_sweep_value(base, SweepVariable::delta_omega0, 9.0).schedule.delta_omega0_rad_s == 9.0);
}

TEST_CASE("sweep keeps order and records failing rows") {
  // T below tau fails validation before any numerics.
  const ExperimentConfig base = parse_config("");
  const SweepResult r = run_sweep(base, SweepVariable::T, {0.001, 0.002, 0.003}, 2);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].value == 0.001);
  CHECK(r.rows[2].value == 0.003);
  CHECK(r.failures() == 3);
  for (const auto& row : r.rows) CHECK(row.error.find("tau") != std::string::npos);
  CHECK_THROWS_AS(r.best(), SolverError);
  std::ostringstream os;
  write_sweep_csv(os, r);
  CHECK(os.str().rfind("value,P_L,P_M,P_R,loss,error\n", 0) == 0);
  CHECK_THROWS_AS(run_sweep(base, SweepVariable::T, {0.2, 0.1}), ConfigError);
  CHECK_THROWS_AS(run_sweep(base, SweepVariable::T, {}), ConfigError);
}

TEST_CASE("best row and loss") {
  SweepResult r;
  r.rows.resize(3);
  r.rows[0].P_R = 0.5;
  r.rows[1].P_R = 0.9;
  r.rows[2].P_R = 0.95;
  r.rows[2].error = "failed";
  CHECK(r.best().P_R == 0.9);
  CHECK(r.best().loss() == doctest::Approx(0.1));
}

TEST_CASE("sensitivity probe bounds") {
  const ExperimentConfig base = parse_config("");
  CHECK_THROWS_AS(sensitivity_probe(base, 0.3), DomainError);
  CHECK_THROWS_AS(sensitivity_probe(base, -0.1), DomainError);
  const SensitivityResult zero = sensitivity_probe(base, 0.0);
  CHECK(zero.max_change == 0.0);
}

TEST_CASE("Landau-Zener ratios") {
  CombFrequencies w{};
  for (std::size_t n = 0; n < kCombSize; ++n) w[n] = 100.0 * static_cast<double>(n + 1);
  const CtapSchedule s = CtapSchedule::make(w, 0.1, 1.0, PulseOrder::counter_intuitive, 50.0);
  const auto lz = landau_zener_diagnostic(s, 10.0, 20001);
  REQUIRE(lz.size() == 6);
  CHECK(std::isinf(lz[0].ratio));
  CHECK(std::isinf(lz[1].ratio));
  // Line 6 moves with the sum of both pulses; line 4 with one full pulse.
  const double one_pulse = 50.0 * M_PI / 0.9;
  CHECK(lz[3].max_rate == doctest::Approx(one_pulse).epsilon(1e-6));
  CHECK(lz[3].ratio == doctest::Approx(100.0 / one_pulse).epsilon(1e-6));
  CHECK(lz[3].flagged);
  CHECK_FALSE(landau_zener_diagnostic(s, 1e3)[3].flagged);
  CHECK_THROWS_AS(landau_zener_diagnostic(s, 0.0), DomainError);
}
