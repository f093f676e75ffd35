#include <doctest.h>

#include <cmath>

#include "ctap/config.hpp"
#include "ctap/errors.hpp"

using namespace ctap;

namespace {

std::string error_path(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const ExperimentConfig c = parse_config("");
  REQUIRE(c.comb_omegas_rad_s.size() == 6);
  CHECK(c.comb_omegas_rad_s[1] == doctest::Approx(2 * M_PI * 2e7));
  CHECK(c.schedule.total_T_s == 0.11);
  CHECK(c.schedule.tau_s == 0.0055);
  CHECK(c.gradient_T_per_m == 2.13);
  CHECK(c.g1d_J_m() == 0.0);
}

TEST_CASE("unknown and mistyped keys name the field") {
  CHECK(error_path(R"({"schedule": {"total_T": 1}})") == "schedule.total_T");
  CHECK(error_path(R"({"grid": {"n_points": "many"}})") == "grid.n_points");
  CHECK(error_path(R"({"bogus": 1})") == "bogus");
  CHECK(error_path(R"({"grid": {"n_points": 1000}})") == "grid.n_points");
  CHECK(error_path(R"({"schedule": {"tau_s": 0.2}})") == "schedule.tau_s");
  CHECK(error_path(R"({"schedule": {"mode": "sideways"}})") == "schedule.mode");
  CHECK(error_path("{not json") == "<file>");
  CHECK(error_path("", {"schedule.total_T_s"}) == "--override");
}

TEST_CASE("overrides use dotted paths") {
  const ExperimentConfig c =
      parse_config("", {"schedule.total_T_s=0.5", "schedule.mode=intuitive", "schedule.detuning.enabled=true",
                        "interaction.g1d_J_m=1e-38", "grid.n_points=512"});
  CHECK(c.schedule.total_T_s == 0.5);
  CHECK(c.schedule.mode == PulseOrder::intuitive);
  CHECK(c.schedule.detuning_enabled);
  CHECK(c.g1d_J_m() == 1e-38);
  CHECK(c.grid.n_points == 512);
}

TEST_CASE("interaction from atom number") {
  const ExperimentConfig c = parse_config(R"({"interaction": {"n_atoms": 2}})");
  CHECK(c.g1d_J_m() == doctest::Approx(2.0557e-37).epsilon(1e-3));
  CHECK(error_path(R"({"interaction": {"n_atoms": 2, "a_perp_m": 5e-9}})") == "interaction.a_perp_m");
}

TEST_CASE("canonical form and hash") {
  const ExperimentConfig a = parse_config(R"({"schedule": {"total_T_s": 0.2}})");
  const ExperimentConfig b = parse_config("", {"schedule.total_T_s=0.2"});
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(a.hash() != parse_config("").hash());
  // Reference FNV-1a values.
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  // The canonical form parses back to itself.
  CHECK(parse_config(a.canonical()).canonical() == a.canonical());
}

TEST_CASE("sweep variables") {
  CHECK(parse_sweep_variable("kappa") == SweepVariable::kappa);
  CHECK(to_string(SweepVariable::g_1d) == "g_1d");
  CHECK_THROWS_AS(parse_sweep_variable("mass"), DomainError);
  CHECK(error_path(R"({"sweep": {"variable": "mass"}})") == "sweep.variable");
  CHECK(error_path(R"({"sweep": {"variable": "T", "values": [0.2, 0.1]}})") == "sweep.values");
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
