#include "ctap/config.hpp"

#include <json.hpp>

#include "ctap/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace ctap {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Walks one JSON object, remembering which keys were consumed so that
// unknown (usually misspelt) keys can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return number_at(key);
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number_at(key);
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(check_finite(v[i].get<double>(), field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    if (!j_.contains(key) || j_.at(key).is_null()) return Section(empty, field(key));
    return Section(j_.at(key), field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  double number_at(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return check_finite(v.get<double>(), field(key));
  }
  static double check_finite(double v, const std::string& path) {
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

PulseOrder parse_mode(const std::string& s, const std::string& path) {
  if (s == "counter_intuitive") return PulseOrder::counter_intuitive;
  if (s == "intuitive") return PulseOrder::intuitive;
  throw ConfigError(path, "mode must be counter_intuitive or intuitive, got '" + s + "'");
}

Branch parse_branch(const std::string& s, const std::string& path) {
  if (s == "upper") return Branch::upper;
  if (s == "lower") return Branch::lower;
  throw ConfigError(path, "branch must be upper or lower, got '" + s + "'");
}

PulseShape parse_shape(const std::string& s, const std::string& path) {
  if (s == "raised_cosine") return PulseShape::raised_cosine;
  if (s == "gaussian") return PulseShape::gaussian;
  throw ConfigError(path, "shape must be raised_cosine or gaussian, got '" + s + "'");
}

std::array<double, 3> triple(Section& s, const std::string& key, const std::array<double, 3>& fallback) {
  const auto v = s.numbers(key, {fallback.begin(), fallback.end()});
  if (v.size() != 3) throw ConfigError(s.field(key), "expected three values (L, M, R)");
  return {v[0], v[1], v[2]};
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["species"] = {{"mass_kg", c.species.mass_kg},
                  {"g_F", c.species.g_F},
                  {"F", c.species.F},
                  {"m_F", c.species.m_F},
                  {"m_F_prime", c.species.m_F_prime}};
  j["field"] = {{"gradient_T_per_m", c.gradient_T_per_m}};
  j["comb"] = {{"omegas_rad_s", c.comb_omegas_rad_s},
               {"rabi_rad_s", c.rabi_rad_s},
               {"branch", c.branch == Branch::upper ? "upper" : "lower"},
               {"stitch_tolerance_hbar_rabi", c.stitch_tolerance}};
  const auto& s = c.schedule;
  j["schedule"] = {{"total_T_s", s.total_T_s},
                   {"tau_s", s.tau_s},
                   {"mode", to_string(s.mode)},
                   {"closest_spacing_rad_s", s.closest_spacing_rad_s},
                   {"detuning", {{"enabled", s.detuning_enabled},
                                 {"kappa_per_s", s.kappa_per_s},
                                 {"delta_omega0_rad_s", s.delta_omega0_rad_s}}}};
  json inter = {{"n_atoms", c.interaction.n_atoms},
                {"a_s_m", c.interaction.a_s_m},
                {"a_perp_m", c.interaction.a_perp_m}};
  put_optional(inter, "g1d_J_m", c.interaction.g1d_J_m);
  j["interaction"] = inter;
  json grid = {{"n_points", c.grid.n_points}, {"padding_spacings", c.grid.padding_spacings}};
  put_optional(grid, "x_min_m", c.grid.x_min_m);
  put_optional(grid, "x_max_m", c.grid.x_max_m);
  j["grid"] = grid;
  json solver = {{"stability_limit_rad", c.solver.stability_limit_rad},
                 {"ground_state_tolerance", c.solver.ground_state_tolerance},
                 {"edge_density_limit", c.solver.edge_density_limit}};
  put_optional(solver, "dt_s", c.solver.dt_s);
  put_optional(solver, "norm_drift_limit", c.solver.norm_drift_limit);
  put_optional(solver, "omega_ref_rad_s", c.solver.omega_ref_rad_s);
  j["solver"] = solver;
  j["output"] = {{"samples", c.output.samples},
                 {"potential_time_s", c.output.potential_time_s},
                 {"coupling_samples", c.output.coupling_samples},
                 {"snapshot_fractions", c.output.snapshot_fractions}};
  const auto& t = c.three_level;
  j["three_level"] = {{"total_T_s", t.total_T_s},
                      {"peak_coupling_rad_s", t.peak_coupling_rad_s},
                      {"delay_s", t.delay_s},
                      {"width_s", t.width_s},
                      {"shape", t.shape == PulseShape::raised_cosine ? "raised_cosine" : "gaussian"},
                      {"mode", to_string(t.mode)},
                      {"dt_s", t.dt_s},
                      {"on_site_rad_s", t.on_site_rad_s},
                      {"self_consistent", t.self_consistent},
                      {"mu_rad_s", t.mu_rad_s}};
  j["sweep"] = {{"variable", to_string(c.sweep.variable)}, {"values", c.sweep.values}, {"threads", c.sweep.threads}};
  return j;
}

ExperimentConfig from_json(const json& root) {
  ExperimentConfig c;
  Section r(root, "");

  Section sp = r.child("species");
  c.species.mass_kg = sp.number("mass_kg", c.species.mass_kg);
  c.species.g_F = sp.number("g_F", c.species.g_F);
  c.species.F = sp.number("F", c.species.F);
  c.species.m_F = sp.number("m_F", c.species.m_F);
  c.species.m_F_prime = sp.number("m_F_prime", c.species.m_F_prime);
  sp.finish();

  Section fd = r.child("field");
  c.gradient_T_per_m = fd.number("gradient_T_per_m", c.gradient_T_per_m);
  fd.finish();

  Section cb = r.child("comb");
  c.comb_omegas_rad_s = cb.numbers("omegas_rad_s", c.comb_omegas_rad_s);
  c.rabi_rad_s = cb.number("rabi_rad_s", c.rabi_rad_s);
  c.branch = parse_branch(cb.text("branch", "upper"), cb.field("branch"));
  c.stitch_tolerance = cb.number("stitch_tolerance_hbar_rabi", c.stitch_tolerance);
  cb.finish();

  Section sc = r.child("schedule");
  auto& s = c.schedule;
  s.total_T_s = sc.number("total_T_s", s.total_T_s);
  s.tau_s = sc.number("tau_s", s.tau_s);
  s.mode = parse_mode(sc.text("mode", to_string(s.mode)), sc.field("mode"));
  s.closest_spacing_rad_s = sc.number("closest_spacing_rad_s", s.closest_spacing_rad_s);
  Section dt = sc.child("detuning");
  s.detuning_enabled = dt.boolean("enabled", s.detuning_enabled);
  s.kappa_per_s = dt.number("kappa_per_s", s.kappa_per_s);
  s.delta_omega0_rad_s = dt.number("delta_omega0_rad_s", s.delta_omega0_rad_s);
  dt.finish();
  sc.finish();

  Section in = r.child("interaction");
  c.interaction.g1d_J_m = in.optional_number("g1d_J_m");
  c.interaction.n_atoms = in.number("n_atoms", c.interaction.n_atoms);
  c.interaction.a_s_m = in.number("a_s_m", c.interaction.a_s_m);
  c.interaction.a_perp_m = in.number("a_perp_m", c.interaction.a_perp_m);
  in.finish();

  Section gr = r.child("grid");
  c.grid.n_points = gr.integer("n_points", static_cast<long>(c.grid.n_points));
  c.grid.x_min_m = gr.optional_number("x_min_m");
  c.grid.x_max_m = gr.optional_number("x_max_m");
  c.grid.padding_spacings = gr.number("padding_spacings", c.grid.padding_spacings);
  gr.finish();

  Section so = r.child("solver");
  c.solver.dt_s = so.optional_number("dt_s");
  c.solver.stability_limit_rad = so.number("stability_limit_rad", c.solver.stability_limit_rad);
  c.solver.ground_state_tolerance = so.number("ground_state_tolerance", c.solver.ground_state_tolerance);
  c.solver.edge_density_limit = so.number("edge_density_limit", c.solver.edge_density_limit);
  c.solver.norm_drift_limit = so.optional_number("norm_drift_limit");
  c.solver.omega_ref_rad_s = so.optional_number("omega_ref_rad_s");
  so.finish();

  Section ou = r.child("output");
  const long samples = ou.integer("samples", static_cast<long>(c.output.samples));
  if (samples < 2) throw ConfigError(ou.field("samples"), "need at least two samples");
  c.output.samples = static_cast<std::size_t>(samples);
  c.output.potential_time_s = ou.number("potential_time_s", c.output.potential_time_s);
  const long cs = ou.integer("coupling_samples", static_cast<long>(c.output.coupling_samples));
  if (cs < 0 || cs == 1) throw ConfigError(ou.field("coupling_samples"), "must be 0 or at least 2");
  c.output.coupling_samples = static_cast<std::size_t>(cs);
  c.output.snapshot_fractions = ou.numbers("snapshot_fractions", c.output.snapshot_fractions);
  ou.finish();

  Section tl = r.child("three_level");
  auto& t = c.three_level;
  t.total_T_s = tl.number("total_T_s", t.total_T_s);
  t.peak_coupling_rad_s = tl.number("peak_coupling_rad_s", t.peak_coupling_rad_s);
  t.delay_s = tl.number("delay_s", t.delay_s);
  t.width_s = tl.number("width_s", t.width_s);
  t.shape = parse_shape(tl.text("shape", "raised_cosine"), tl.field("shape"));
  t.mode = parse_mode(tl.text("mode", to_string(t.mode)), tl.field("mode"));
  t.dt_s = tl.number("dt_s", t.dt_s);
  t.on_site_rad_s = triple(tl, "on_site_rad_s", t.on_site_rad_s);
  t.self_consistent = tl.boolean("self_consistent", t.self_consistent);
  t.mu_rad_s = triple(tl, "mu_rad_s", t.mu_rad_s);
  tl.finish();

  Section sw = r.child("sweep");
  const std::string var = sw.text("variable", to_string(c.sweep.variable));
  try {
    c.sweep.variable = parse_sweep_variable(var);
  } catch (const DomainError& e) {
    throw ConfigError(sw.field("variable"), e.what());
  }
  c.sweep.values = sw.numbers("values", c.sweep.values);
  const long threads = sw.integer("threads", 0);
  if (threads < 0) throw ConfigError(sw.field("threads"), "must be non-negative");
  c.sweep.threads = static_cast<unsigned>(threads);
  sw.finish();

  r.finish();
  return c;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--override", "expected key=value, got '" + spec + "'");
  const std::string path = spec.substr(0, eq);
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError(path, "empty path component in override");
    if (!node->is_object()) throw ConfigError(path, "override path runs through a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = parse_override_value(spec.substr(eq + 1));
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  // omega_1 far below the trapping lines; omega_n = 2 pi n 10^7 rad/s for n = 2..6.
  comb_omegas_rad_s = {kTwoPi * 1e6, kTwoPi * 2e7, kTwoPi * 3e7, kTwoPi * 4e7, kTwoPi * 5e7, kTwoPi * 6e7};
}

std::string ExperimentConfig::canonical() const { return to_json(*this).dump(2); }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

double ExperimentConfig::g1d_J_m() const {
  if (interaction.g1d_J_m) return *interaction.g1d_J_m;
  return g1d_from_atoms(InteractionParams{interaction.n_atoms, interaction.a_s_m, interaction.a_perp_m}, species);
}

std::string to_string(PulseOrder mode) {
  return mode == PulseOrder::counter_intuitive ? "counter_intuitive" : "intuitive";
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::g_1d: return "g_1d";
    case SweepVariable::kappa: return "kappa";
    case SweepVariable::T: return "T";
    case SweepVariable::delta_omega0: return "delta_omega0";
  }
  return "";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "g_1d") return SweepVariable::g_1d;
  if (name == "kappa") return SweepVariable::kappa;
  if (name == "T") return SweepVariable::T;
  if (name == "delta_omega0") return SweepVariable::delta_omega0;
  throw DomainError("unknown sweep variable '" + name + "' (g_1d, kappa, T, delta_omega0)");
}

void validate(const ExperimentConfig& c) {
  try {
    c.species.validate();
  } catch (const DomainError& e) {
    throw ConfigError("species", e.what());
  }
  if (!(c.gradient_T_per_m > 0.0)) throw ConfigError("field.gradient_T_per_m", "must be positive");
  if (c.comb_omegas_rad_s.size() != kCombSize) throw ConfigError("comb.omegas_rad_s", "expected six frequencies");
  try {
    RfComb{c.comb_omegas_rad_s, c.rabi_rad_s}.validate();
  } catch (const DomainError& e) {
    throw ConfigError("comb", e.what());
  }
  if (!(c.stitch_tolerance > 0.0)) throw ConfigError("comb.stitch_tolerance_hbar_rabi", "must be positive");

  const auto& s = c.schedule;
  if (!(s.total_T_s > 0.0)) throw ConfigError("schedule.total_T_s", "must be positive");
  if (!(s.tau_s > 0.0) || !(s.tau_s < s.total_T_s)) throw ConfigError("schedule.tau_s", "need 0 < tau < T");
  const double spacing = c.comb_omegas_rad_s[2] - c.comb_omegas_rad_s[1];
  if (!(s.closest_spacing_rad_s > 2.0 * c.rabi_rad_s) || !(s.closest_spacing_rad_s < spacing)) {
    throw ConfigError("schedule.closest_spacing_rad_s", "must lie between 2 * rabi and the initial spacing");
  }
  if (s.detuning_enabled) {
    if (!(s.kappa_per_s >= 0.0)) throw ConfigError("schedule.detuning.kappa_per_s", "must be non-negative");
    if (!(s.delta_omega0_rad_s < spacing)) {
      throw ConfigError("schedule.detuning.delta_omega0_rad_s", "must be smaller than the comb spacing");
    }
  }
  try {
    CombFrequencies w{};
    std::copy(c.comb_omegas_rad_s.begin(), c.comb_omegas_rad_s.end(), w.begin());
    const auto sched = CtapSchedule::make(w, s.tau_s, s.total_T_s, s.mode,
                                          ramp_peak_for_spacing(spacing, s.closest_spacing_rad_s));
    (void)sched;
  } catch (const DomainError& e) {
    throw ConfigError("schedule", e.what());
  }

  const auto& in = c.interaction;
  if (in.g1d_J_m && !(*in.g1d_J_m >= 0.0)) throw ConfigError("interaction.g1d_J_m", "must be non-negative");
  if (!in.g1d_J_m) {
    if (!(in.n_atoms >= 0.0)) throw ConfigError("interaction.n_atoms", "must be non-negative");
    if (!(in.a_perp_m > 0.0)) throw ConfigError("interaction.a_perp_m", "must be positive");
    if (!(in.a_perp_m > kConfinementConstant * in.a_s_m)) {
      throw ConfigError("interaction.a_perp_m", "at or beyond the confinement-induced resonance");
    }
  }

  const auto& g = c.grid;
  if (g.n_points < 256 || g.n_points > 4096 || (g.n_points & (g.n_points - 1)) != 0) {
    throw ConfigError("grid.n_points", "must be a power of two in [256, 4096]");
  }
  if (g.x_min_m.has_value() != g.x_max_m.has_value()) {
    throw ConfigError("grid", "x_min_m and x_max_m must be given together");
  }
  if (g.x_min_m && !(*g.x_max_m > *g.x_min_m)) throw ConfigError("grid.x_max_m", "must exceed x_min_m");
  if (!(g.padding_spacings > 0.0)) throw ConfigError("grid.padding_spacings", "must be positive");

  const auto& so = c.solver;
  if (so.dt_s && !(*so.dt_s > 0.0)) throw ConfigError("solver.dt_s", "must be positive");
  if (!(so.stability_limit_rad > 0.0)) throw ConfigError("solver.stability_limit_rad", "must be positive");
  if (!(so.ground_state_tolerance > 0.0)) throw ConfigError("solver.ground_state_tolerance", "must be positive");
  if (!(so.edge_density_limit > 0.0)) throw ConfigError("solver.edge_density_limit", "must be positive");
  if (so.omega_ref_rad_s && !(*so.omega_ref_rad_s > 0.0)) throw ConfigError("solver.omega_ref_rad_s", "must be positive");

  const auto& o = c.output;
  if (o.potential_time_s < 0.0 || o.potential_time_s > s.total_T_s) {
    throw ConfigError("output.potential_time_s", "must lie in [0, T]");
  }
  for (double f : o.snapshot_fractions) {
    if (f < 0.0 || f > 1.0) throw ConfigError("output.snapshot_fractions", "fractions must lie in [0, 1]");
  }

  const auto& t = c.three_level;
  if (!(t.total_T_s > 0.0)) throw ConfigError("three_level.total_T_s", "must be positive");
  if (!(t.peak_coupling_rad_s >= 0.0)) throw ConfigError("three_level.peak_coupling_rad_s", "must be non-negative");
  if (!(t.width_s > 0.0)) throw ConfigError("three_level.width_s", "must be positive");
  if (!(t.dt_s > 0.0)) throw ConfigError("three_level.dt_s", "must be positive");

  const auto& v = c.sweep.values;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw ConfigError("sweep.values", "must be strictly increasing");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(root, o);
  ExperimentConfig c = from_json(root);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace ctap
