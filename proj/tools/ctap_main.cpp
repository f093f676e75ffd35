#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ctap/analysis.hpp"
#include "ctap/config.hpp"
#include "ctap/csv.hpp"
#include "ctap/experiment.hpp"

using namespace ctap;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
};

using Meta = std::vector<std::pair<std::string, std::string>>;

ExperimentConfig load(const Options& o) {
  return o.config.empty() ? parse_config("", o.overrides) : load_config(o.config, o.overrides);
}

void emit(const Options& o, const std::string& name, const Meta& meta, const std::string& body) {
  fs::create_directories(o.out);
  std::ostringstream os;
  write_comment_block(os, meta);
  os << body;
  write_text_file((fs::path(o.out) / name).string(), os.str());
}

template <typename F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

void summarise_geometry(const TrapGeometry& geo, const UnitScaling& s) {
  std::fprintf(stderr, "%zu minima\n", geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    std::fprintf(stderr, "  minimum %zu: x=%.9g m omega=%.6g rad/s\n", i, geo.minima_positions[i] * s.length_m,
                 geo.curvatures[i] / s.time_s);
  }
  for (std::size_t i = 0; i < geo.barrier_heights.size(); ++i) {
    std::fprintf(stderr, "  barrier %zu: x=%.9g m height=%.6g J\n", i, geo.barrier_positions[i] * s.length_m,
                 geo.barrier_heights[i] * s.energy_J);
  }
}

int cmd_potential(const Options& o) {
  const Experiment e = make_experiment(load(o));
  const double t = e.to_time(e.config.output.potential_time_s);
  const PotentialSnapshot s = e.potential_at(t);
  Meta meta = e.metadata();
  meta.emplace_back("t_s", format_double(e.config.output.potential_time_s));
  // Geometry is a summary only; a snapshot without three traps is still written.
  std::optional<TrapGeometry> geo;
  try {
    geo = trap_geometry(s, std::nullopt, e.kinetic);
  } catch (const GeometryError&) {
  }
  emit(o, "potential.csv", meta, render([&](std::ostream& os) { write_potential_csv(os, s, e.scaling); }));
  if (geo) summarise_geometry(*geo, e.scaling);
  return 0;
}

int cmd_ground_state(const Options& o) {
  const Experiment e = make_experiment(load(o));
  const GroundState gs = e.initial_state();
  Meta meta = e.metadata();
  meta.emplace_back("mu_J", format_double(gs.mu * e.scaling.energy_J));
  meta.emplace_back("residual", format_double(gs.residual));
  meta.emplace_back("iterations", std::to_string(gs.iterations));
  emit(o, "ground_state.csv", meta, render([&](std::ostream& os) { write_wavefunction_csv(os, gs.psi, e.scaling); }));
  std::fprintf(stderr, "mu=%.9g J (%.9g hbar omega_ref) residual=%.3g\n", gs.mu * e.scaling.energy_J, gs.mu,
               gs.residual);
  return 0;
}

int cmd_ctap(const Options& o) {
  const Experiment e = make_experiment(load(o));
  const RunRecord rec = e.run();
  const Meta meta = e.metadata();
  emit(o, "run.csv", meta, render([&](std::ostream& os) { write_run_csv(os, rec, e.scaling); }));
  emit(o, "schedule.csv", meta, render([&](std::ostream& os) {
         write_schedule_csv(os, e.schedule, e.config.output.samples);
       }));
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    Meta m = meta;
    m.emplace_back("t_s", format_double(e.time_s(rec.snapshots[k].first)));
    emit(o, "psi_" + std::to_string(k) + ".csv", m,
         render([&](std::ostream& os) { write_wavefunction_csv(os, rec.snapshots[k].second, e.scaling); }));
  }
  if (e.config.output.coupling_samples > 0) {
    const CouplingTrace tr = e.coupling_trace(e.config.output.coupling_samples);
    emit(o, "couplings.csv", meta, render([&](std::ostream& os) {
           write_couplings_csv(os, tr, e.scaling.time_s, 1.0 / e.scaling.time_s);
         }));
  }
  const std::size_t fallbacks =
      static_cast<std::size_t>(std::count(rec.geometry_fallback.begin(), rec.geometry_fallback.end(), true));
  std::printf("final P_R=%.6f P_M=%.6f P_L=%.6f max P_M=%.6f norm drift=%.3g mode=%s\n", rec.final_right(),
              rec.populations(rec.populations.rows() - 1, 1), rec.populations(rec.populations.rows() - 1, 0),
              rec.max_middle(), rec.norm_drift(), to_string(e.config.schedule.mode).c_str());
  if (rec.max_middle() >= 0.01) {
    std::printf("note: middle trap populated (max P_M=%.4f); outcome is Rabi-oscillatory in T\n", rec.max_middle());
  }
  if (fallbacks) std::printf("note: %zu samples reused the previous trap geometry\n", fallbacks);
  return 0;
}

int cmd_sweep(const Options& o) {
  const ExperimentConfig cfg = load(o);
  if (cfg.sweep.values.empty()) throw ConfigError("sweep.values", "must not be empty");
  const SweepResult r = run_sweep(cfg, cfg.sweep.variable, cfg.sweep.values, cfg.sweep.threads);
  Meta meta = make_experiment(cfg).metadata();
  meta.emplace_back("sweep_variable", to_string(cfg.sweep.variable));
  emit(o, "sweep.csv", meta, render([&](std::ostream& os) { write_sweep_csv(os, r); }));
  for (const auto& row : r.rows) {
    if (!row.ok()) std::fprintf(stderr, "row %s failed: %s\n", format_double(row.value).c_str(), row.error.c_str());
  }
  if (r.failures() == r.rows.size()) {
    std::fprintf(stderr, "every sweep row failed\n");
    return 3;
  }
  const SweepRow& best = r.best();
  std::printf("best %s=%s P_R=%.6f loss=%.6f (%zu of %zu rows failed)\n", to_string(cfg.sweep.variable).c_str(),
              format_double(best.value).c_str(), best.P_R, best.loss(), r.failures(), r.rows.size());
  return 0;
}

int cmd_three_level(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const ThreeLevelRecord rec = run_three_level(cfg.three_level);
  Meta meta{{"config_hash", cfg.hash()},
            {"dt_s", format_double(cfg.three_level.dt_s)},
            {"integrator", "rk4"},
            {"norm_drift", format_double(rec.norm_drift())}};
  emit(o, "three_level.csv", meta, render([&](std::ostream& os) { write_three_level_csv(os, rec); }));
  std::printf("final P_R=%.9f max P_M=%.3g\n", rec.final_right(), rec.max_middle());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic passage in rf-dressed triple wells"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment configuration (JSON)");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--override", opt.overrides, "key=value, dotted key path")->take_all();
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"potential", "adiabatic potential at output.potential_time_s", cmd_potential},
      {"ground-state", "interacting ground state of the left trap at t = 0", cmd_ground_state},
      {"ctap", "full transport run", cmd_ctap},
      {"sweep", "one run per sweep value", cmd_sweep},
      {"three-level", "reduced three-trap model", cmd_three_level},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) return cmd->run(opt);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  }
  return 0;
}
