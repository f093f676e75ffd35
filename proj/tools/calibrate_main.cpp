// Prints the quantities used to choose a parameter set: trap frequencies and
// barriers at t = 0, the tunnel couplings and well detunings along the run,
// the reduced-model prediction built from them, and Landau-Zener ratios.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

#include "ctap/analysis.hpp"
#include "ctap/config.hpp"
#include "ctap/experiment.hpp"
#include "ctap/three_level.hpp"

using namespace ctap;

namespace {

struct Row {
  double t = 0.0;
  double j_lm = 0.0;
  double d_lm = 0.0;
  double j_mr = 0.0;
  double d_mr = 0.0;
};

Row lerp(const Row& a, const Row& b, double f) {
  auto mix = [f](double x, double y) { return (1.0 - f) * x + f * y; };
  return Row{mix(a.t, b.t), mix(a.j_lm, b.j_lm), mix(a.d_lm, b.d_lm), mix(a.j_mr, b.j_mr), mix(a.d_mr, b.d_mr)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-set diagnostics"};
  std::string config_path;
  std::vector<std::string> overrides;
  std::size_t points = 201;
  double shift_target = 0.0;
  bool show_trace = false;
  app.add_option("--config", config_path, "experiment configuration (JSON)");
  app.add_option("--override", overrides, "key=value override")->take_all();
  app.add_option("--points", points, "coupling trace points");
  app.add_flag("--trace", show_trace, "print couplings and well detunings along the run");
  app.add_option("--shift", shift_target, "solve g1d for this (mu - E0)/hbar omega");
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
    const Experiment e = make_experiment(cfg);
    const PotentialSnapshot s0 = e.potential_at(0.0);
    const TrapGeometry geo = trap_geometry(s0, 3, e.kinetic);
    const GroundState gs = e.initial_state();
    std::printf("omega_ref = %.6g rad/s  (Omega/omega_ref = %.4g)\n", e.omega_ref, cfg.rabi_rad_s / e.omega_ref);
    std::printf("length unit = %.6g m, grid dx = %.4g, E_max = %.4g, dt = %.4g, steps = %.0f\n", e.scaling.length_m,
                e.grid.dx(), e.kinetic * std::pow(e.grid.max_wavenumber(), 2), e.dt,
                std::ceil(e.to_time(cfg.schedule.total_T_s) / e.dt));
    for (std::size_t i = 0; i < geo.size(); ++i) {
      std::printf("trap %zu: x = %.6g  omega = %.6g  V = %.6g\n", i, geo.minima_positions[i], geo.curvatures[i],
                  geo.minima_values[i]);
    }
    for (std::size_t i = 0; i < geo.barrier_heights.size(); ++i) {
      std::printf("barrier %zu: x = %.6g  height = %.6g\n", i, geo.barrier_positions[i], geo.barrier_heights[i]);
    }
    std::printf("ground state: mu = %.8g (above left minimum %.6g), iterations %ld\n", gs.mu,
                gs.mu - geo.minima_values[0], gs.iterations);
    std::printf("edge density: %.3g %.3g\n", std::norm(gs.psi.amplitudes(0)),
                std::norm(gs.psi.amplitudes(e.grid.n_points - 1)));

    // Couplings and well detunings along the run; unresolved points count as
    // decoupled wells.
    const double t_end = e.to_time(cfg.schedule.total_T_s);
    std::vector<Row> rows;
    std::size_t unresolved = 0;
    if (show_trace) std::printf("t/T, J_LM, delta_LM, J_MR, delta_MR, barrier_LM, barrier_MR\n");
    for (std::size_t i = 0; i < points; ++i) {
      Row r;
      r.t = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
      try {
        const PotentialSnapshot s = e.potential_at(r.t);
        const TrapGeometry g = trap_geometry(s, 3, e.kinetic);
        const DoubletSplitting a = tunneling_extract(s, g, 0, e.kinetic);
        const DoubletSplitting b = tunneling_extract(s, g, 1, e.kinetic);
        r.j_lm = a.J;
        r.d_lm = a.detuning;
        r.j_mr = b.J;
        r.d_mr = b.detuning;
        if (show_trace) {
          std::printf("%.4f %.4g %.4g %.4g %.4g %.4g %.4g\n", r.t / t_end, a.J, a.detuning, b.J, b.detuning,
                      g.barrier_heights[0], g.barrier_heights[1]);
        }
      } catch (const SolverError& err) {
        ++unresolved;
        if (show_trace) std::printf("%.4f unresolved: %s\n", r.t / t_end, err.what());
      }
      rows.push_back(r);
    }
    double int_lm = 0.0, int_mr = 0.0, peak_lm = 0.0, peak_mr = 0.0, t_lm = 0.0, t_mr = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double h = rows[i + 1].t - rows[i].t;
      int_lm += 0.5 * h * (rows[i].j_lm + rows[i + 1].j_lm);
      int_mr += 0.5 * h * (rows[i].j_mr + rows[i + 1].j_mr);
      if (rows[i].j_lm > peak_lm) peak_lm = rows[i].j_lm, t_lm = rows[i].t;
      if (rows[i].j_mr > peak_mr) peak_mr = rows[i].j_mr, t_mr = rows[i].t;
    }
    std::printf("J_LM: peak %.4g at t/T = %.4f, integral %.4g\n", peak_lm, t_lm / t_end, int_lm);
    std::printf("J_MR: peak %.4g at t/T = %.4f, integral %.4g\n", peak_mr, t_mr / t_end, int_mr);
    std::printf("unresolved trace points: %zu of %zu\n", unresolved, rows.size());

    auto at = [&](double t) {
      if (t <= rows.front().t) return rows.front();
      if (t >= rows.back().t) return rows.back();
      const double u = t / t_end * static_cast<double>(rows.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(u), rows.size() - 2);
      const double f = u - static_cast<double>(i);
      return lerp(rows[i], rows[i + 1], f);
    };
    CouplingFunction couplings = [&](double t) {
      const Row r = at(t);
      return Couplings{r.j_lm, r.j_mr};
    };
    // eps_L - eps_M = delta_LM and eps_M - eps_R = delta_MR.
    OnSiteFunction on_site = [&](double t, const Eigen::Vector3d&) {
      const Row r = at(t);
      return OnSiteEnergies{r.d_lm, 0.0, -r.d_mr};
    };
    IntegrateOptions opt;
    opt.dt = std::min(1e-2, 0.05 / std::max({peak_lm, peak_mr, 1e-12}));
    const ThreeLevelRecord bare = integrate(couplings, ThreeState(1.0, 0.0, 0.0), t_end, opt);
    const ThreeLevelRecord full = integrate(couplings, on_site, ThreeState(1.0, 0.0, 0.0), t_end, opt);
    std::printf("reduced model, couplings only: P_R = %.6f, max P_M = %.3g\n", bare.final_right(), bare.max_middle());
    std::printf("reduced model, with detunings: P_R = %.6f, max P_M = %.3g\n", full.final_right(), full.max_middle());

    for (const auto& lz : landau_zener_diagnostic(e.schedule, cfg.rabi_rad_s)) {
      std::printf("LZ line %zu: ratio %.4g%s\n", lz.line + 1, lz.ratio, lz.flagged ? "  FLAGGED" : "");
    }
    if (shift_target > 0.0) {
      std::printf("g1d for shift %.6g: %.6g J m\n", shift_target, g1d_for_shift(e, shift_target));
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  }
  return 0;
}
