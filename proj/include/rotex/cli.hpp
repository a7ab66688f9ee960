#pragma once

// Experiment specification (INI with sections, versioned), field and profile
// registries, and the subcommand drivers behind the command-line tool.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "rotex/exact_checks.hpp"
#include "rotex/experiments.hpp"
#include "rotex/hodge.hpp"
#include "rotex/hydro.hpp"
#include "rotex/io.hpp"
#include "rotex/simulator.hpp"

namespace rotex {

inline constexpr int kSpecVersion = 1;
inline const std::vector<std::string> kSubcommands{"verify", "simulate", "hydro-compare", "current-compare",
                                                   "einstein", "hodge"};

// Invalid user input; maps to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec {
  std::string subcommand = "verify";
  int n = 16;
  // Kept as text so exact checks see the exact rational value.
  std::optional<std::string> alpha;
  double t = 0.05;
  std::vector<double> times;  // snapshot times; empty means {t}
  int ensemble = 20;
  std::uint64_t seed = 1;
  double k = 3.0;
  int zmax = 3;
  std::string field = "none";  // external field H (einstein, simulate)
  std::string profile = "sine";
  std::vector<std::string> currents{"sin-y", "sin2-y", "cos-x"};
  std::string out;
  bool exact_n4 = false;
  std::string mutate = "none";

  double alpha_value(double fallback = 0.5) const { return alpha ? to_double(parse_rational(*alpha)) : fallback; }
  std::vector<double> snapshot_times() const { return times.empty() ? std::vector<double>{t} : times; }

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// ---------------------------------------------------------------------------
// Registries.

// Named density profiles; "uniform:<rho>" gives a constant.
inline Profile resolve_profile(const std::string& name) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (name == "sine") return [=](const Point& u) { return 0.5 + 0.25 * std::sin(kTwoPi * u[0]); };
  if (name == "cosine") return [=](const Point& u) { return 0.5 + 0.25 * std::numbers::sqrt2 * std::cos(kTwoPi * u[0]); };
  if (name == "half") return [](const Point&) { return 0.5; };
  if (name.rfind("uniform:", 0) == 0) {
    double rho = 0.0;
    try {
      rho = std::stod(name.substr(8));
    } catch (const std::logic_error&) {
      throw UsageError("profile: cannot parse density in '" + name + "'");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) throw UsageError("profile: density in '" + name + "' outside [0, 1]");
    return [rho](const Point&) { return rho; };
  }
  throw UsageError("profile: unknown profile '" + name + "' (sine, cosine, half, uniform:<rho>)");
}

// Named smooth vector fields, "mode:<j>:<z1>:<z2>" for I^{j,z},
// "const:<g1>:<g2>" for constants, or a Fourier CSV file.
inline FourierVectorField resolve_field(const std::string& name) {
  if (name == "sin-y") return sine_field(2, 1);
  if (name == "sin2-y") return sine_field(2, 2);
  if (name == "cos-x") return cosine_field(1, 1);
  if (name == "unit-x") return FourierVectorField::constant(1.0, 0.0);
  if (name == "drive-x") return FourierVectorField::constant(0.5, 0.0);
  if (name == "grad-cos") return fourier_gradient(1, 0, 0.1);
  auto parts = [&](std::size_t skip) {
    std::vector<std::string> out;
    std::stringstream ss(name.substr(skip));
    std::string p;
    while (std::getline(ss, p, ':')) out.push_back(p);
    return out;
  };
  try {
    if (name.rfind("mode:", 0) == 0) {
      const auto p = parts(5);
      if (p.size() != 3) throw UsageError("");
      return FourierVectorField::mode({std::stoi(p[0]), std::stoi(p[1]), std::stoi(p[2])});
    }
    if (name.rfind("const:", 0) == 0) {
      const auto p = parts(6);
      if (p.size() != 2) throw UsageError("");
      return FourierVectorField::constant(std::stod(p[0]), std::stod(p[1]));
    }
  } catch (const std::logic_error&) {
    throw UsageError("field: malformed field id '" + name + "'");
  }
  if (std::filesystem::path(name).extension() == ".csv") {
    if (!std::filesystem::exists(name)) throw UsageError("field: file '" + name + "' not found");
    return read_fourier_csv(name);
  }
  throw UsageError("field: unknown field '" + name +
                   "' (sin-y, sin2-y, cos-x, unit-x, drive-x, grad-cos, mode:j:z1:z2, const:g1:g2, file.csv)");
}

inline std::optional<FourierVectorField> resolve_optional_field(const std::string& name) {
  if (name.empty() || name == "none") return std::nullopt;
  return resolve_field(name);
}

// ---------------------------------------------------------------------------
// Validation and INI round trip.

inline void validate(const ExperimentSpec& s) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), s.subcommand) == kSubcommands.end()) {
    throw UsageError("subcommand: unknown subcommand '" + s.subcommand + "'");
  }
  if (s.n < TorusLattice::kMinSide) throw UsageError("n: lattice side must be at least 3");
  if (s.alpha) {
    Rational a;
    try {
      a = parse_rational(*s.alpha);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("alpha: ") + e.what());
    }
    if (!(std::abs(to_double(a)) < 1.0)) throw UsageError("alpha: must satisfy |alpha| < 1");
  }
  if (!(s.t >= 0.0)) throw UsageError("t: time horizon must be non-negative");
  for (double x : s.times) {
    if (!(x >= 0.0 && x <= s.t)) throw UsageError("times: snapshot time outside [0, t]");
  }
  if (!std::is_sorted(s.times.begin(), s.times.end())) throw UsageError("times: must be sorted");
  if (s.ensemble < 1) throw UsageError("ensemble: must be positive");
  if (!(s.k > kCriticalSobolevIndex)) throw UsageError("k: dual Sobolev index must exceed 2");
  if (s.zmax < 0) throw UsageError("zmax: must be non-negative");
  resolve_profile(s.profile);
  resolve_optional_field(s.field);
  for (const auto& c : s.currents) resolve_field(c);
  try {
    parse_mutation(s.mutate);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("mutate: ") + e.what());
  }
  if (!s.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(s.out, ec);
    const auto probe = std::filesystem::path(s.out) / ".write-probe";
    std::ofstream f(probe);
    if (ec || !f) throw UsageError("out: directory '" + s.out + "' is not writable");
    f.close();
    std::filesystem::remove(probe);
  }
}

namespace detail {

inline std::string exact(double x) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return ss.str();
}

template <class T, class Fn>
std::string join(const std::vector<T>& v, Fn&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + fmt(v[k]);
  return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline std::string to_ini(const ExperimentSpec& s) {
  boost::property_tree::ptree pt;
  pt.put("experiment.version", kSpecVersion);
  pt.put("experiment.subcommand", s.subcommand);
  pt.put("experiment.out", s.out);
  pt.put("model.n", s.n);
  if (s.alpha) pt.put("model.alpha", *s.alpha);
  pt.put("model.field", s.field);
  pt.put("run.t", detail::exact(s.t));
  pt.put("run.times", detail::join(s.times, detail::exact));
  pt.put("run.ensemble", s.ensemble);
  pt.put("run.seed", s.seed);
  pt.put("run.profile", s.profile);
  pt.put("analysis.k", detail::exact(s.k));
  pt.put("analysis.zmax", s.zmax);
  pt.put("analysis.currents", detail::join(s.currents, [](const std::string& x) { return x; }));
  pt.put("analysis.exact_n4", s.exact_n4);
  pt.put("analysis.mutate", s.mutate);
  std::ostringstream out;
  boost::property_tree::write_ini(out, pt);
  return out.str();
}

inline ExperimentSpec from_ini(std::istream& in) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  static const std::vector<std::string> known{
      "experiment.version", "experiment.subcommand", "experiment.out", "model.n",        "model.alpha",
      "model.field",        "run.t",                 "run.times",      "run.ensemble",   "run.seed",
      "run.profile",        "analysis.k",            "analysis.zmax",  "analysis.currents", "analysis.exact_n4",
      "analysis.mutate"};
  for (const auto& [section, body] : pt) {
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (std::find(known.begin(), known.end(), full) == known.end()) throw UsageError("config: unknown key '" + full + "'");
    }
  }
  ExperimentSpec s;
  auto get = [&](const std::string& key, auto fallback) {
    try {
      if (!pt.get_child_optional(key)) return fallback;
      return pt.get<decltype(fallback)>(key);
    } catch (const boost::property_tree::ptree_error&) {
      throw UsageError("config: cannot parse value of '" + key + "'");
    }
  };
  const int version = get("experiment.version", kSpecVersion);
  if (version != kSpecVersion) throw UsageError("config: unsupported version " + std::to_string(version));
  s.subcommand = get("experiment.subcommand", s.subcommand);
  s.out = get("experiment.out", s.out);
  s.n = get("model.n", s.n);
  if (auto a = pt.get_optional<std::string>("model.alpha")) s.alpha = *a;
  s.field = get("model.field", s.field);
  s.t = get("run.t", s.t);
  s.times.clear();
  try {
    for (const auto& x : detail::split_list(get("run.times", std::string()))) s.times.push_back(std::stod(x));
  } catch (const std::logic_error&) {
    throw UsageError("config: cannot parse value of 'run.times'");
  }
  s.ensemble = get("run.ensemble", s.ensemble);
  s.seed = get("run.seed", s.seed);
  s.profile = get("run.profile", s.profile);
  s.k = get("analysis.k", s.k);
  s.zmax = get("analysis.zmax", s.zmax);
  if (auto c = pt.get_optional<std::string>("analysis.currents")) s.currents = detail::split_list(*c);
  s.exact_n4 = get("analysis.exact_n4", s.exact_n4);
  s.mutate = get("analysis.mutate", s.mutate);
  return s;
}

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j{{"version", kSpecVersion}, {"subcommand", s.subcommand}, {"n", s.n},
                   {"t", s.t},                {"times", s.snapshot_times()}, {"ensemble", s.ensemble},
                   {"seed", s.seed},          {"k", s.k},                 {"zmax", s.zmax},
                   {"field", s.field},        {"profile", s.profile},     {"currents", s.currents},
                   {"exact_n4", s.exact_n4},  {"mutate", s.mutate}};
  j["alpha"] = s.alpha ? nlohmann::json(*s.alpha) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Drivers.

struct RunContext {
  const ExperimentSpec& spec;
  std::ostream& log;
  nlohmann::json manifest;

  std::filesystem::path path(const std::string& file) const { return std::filesystem::path(spec.out) / file; }
  bool writes() const { return !spec.out.empty(); }
};

inline SimConfig sim_config(const ExperimentSpec& s) {
  SimConfig cfg;
  cfg.n = s.n;
  cfg.horizon = s.t;
  cfg.alpha = s.alpha_value();
  cfg.field = resolve_optional_field(s.field);
  cfg.profile = resolve_profile(s.profile);
  cfg.seed = s.seed;
  cfg.snapshot_times = s.snapshot_times();
  cfg.ensemble_size = s.ensemble;
  return cfg;
}

inline void print_report(std::ostream& log, const CheckReport& r) {
  log << std::left << std::setw(22) << r.name << (r.pass ? " PASS" : " FAIL") << "  instances=" << r.instances
      << "  max_violation=" << std::setprecision(6) << r.max_violation << "  tolerance=" << r.tolerance
      << "  runtime=" << std::setprecision(3) << r.runtime_seconds << "s";
  if (!r.detail.empty()) log << "  " << r.detail;
  log << '\n';
}

inline nlohmann::json to_json(const CheckReport& r) {
  return {{"name", r.name},           {"instances", r.instances}, {"max_violation", r.max_violation},
          {"tolerance", r.tolerance}, {"pass", r.pass},           {"runtime_seconds", r.runtime_seconds},
          {"detail", r.detail}};
}

inline bool run_verify(RunContext& ctx) {
  const auto& s = ctx.spec;
  const RateMutation mut = parse_mutation(s.mutate);
  std::vector<Rational> alphas;
  if (s.alpha) {
    alphas.push_back(parse_rational(*s.alpha));
  } else {
    alphas = {Rational(0), Rational(1, 2), Rational(-3, 4)};
  }
  std::vector<CheckReport> reports;
  auto add = [&](CheckReport r, const std::string& detail) {
    r.detail = detail;
    print_report(ctx.log, r);
    reports.push_back(std::move(r));
  };
  auto alpha_str = [](const Rational& a) {
    return "alpha=" + std::to_string(a.numerator()) + "/" + std::to_string(a.denominator());
  };
  std::vector<int> sides{3};
  if (s.exact_n4) sides.push_back(4);
  for (int n : sides) {
    for (const auto& a : alphas) add(verify_invariance(n, a, mut), "N=" + std::to_string(n) + " " + alpha_str(a));
  }
  for (const auto& a : alphas) add(verify_face_identity(a, mut), alpha_str(a));
  const Rational a_cs = s.alpha ? alphas.front() : Rational(7, 10);
  for (int n : sides) {
    add(verify_current_structure(n, a_cs, mut), "N=" + std::to_string(n) + " " + alpha_str(a_cs));
  }
  add(verify_current_harmonic_part(3, to_double(a_cs), mut), "N=3 " + alpha_str(a_cs));
  for (const auto& a : alphas) {
    add(verify_coefficients(a, mut), alpha_str(a));
    add(verify_closed_forms(a, mut), alpha_str(a));
  }
  std::vector<double> dir_alphas;
  if (s.alpha) {
    dir_alphas.push_back(to_double(alphas.front()));
  } else {
    dir_alphas = {0.0, 0.5};
  }
  for (double a : dir_alphas) {
    for (double rho : {0.3, 0.5}) {
      std::ostringstream d;
      d << "N=3 rho=" << rho << " alpha=" << a;
      add(verify_dirichlet_identity(3, rho, a, mut), d.str());
    }
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  ctx.manifest["reports"] = nlohmann::json::array();
  for (const auto& r : reports) ctx.manifest["reports"].push_back(to_json(r));

  const Rational a_w = s.alpha ? alphas.front() : Rational(1, 2);
  if (a_w != Rational(0)) {
    if (auto w = detailed_balance_witness(3, a_w)) {
      ctx.log << "detailed balance fails (" << alpha_str(a_w) << "): eta=" << w->configuration << " edge from ("
              << w->tail.i << "," << w->tail.j << ") dir " << static_cast<int>(w->dir) << ": c=" << w->forward
              << " vs reverse c=" << w->backward << '\n';
      ctx.manifest["detailed_balance_witness"] = {{"configuration", w->configuration},
                                                  {"tail", {w->tail.i, w->tail.j}},
                                                  {"direction", static_cast<int>(w->dir)}};
    }
  }
  return ok;
}

inline void write_comparison_csv(const std::filesystem::path& p, const std::vector<ComparisonRow>& rows,
                                 double sigmas, double floor, bool relative_floor = false) {
  auto out = detail::open_out(p);
  out << "id,time,observed,predicted,se,z,pass\n";
  for (const auto& r : rows) {
    const double f = relative_floor ? floor * std::abs(r.predicted) : floor;
    out << detail::quote_csv(r.id) << ',' << r.time << ',' << r.observed << ',' << r.predicted << ',' << r.se << ',' << r.z() << ','
        << (r.within(sigmas, f) ? 1 : 0) << '\n';
  }
}

inline void print_rows(std::ostream& log, const std::vector<ComparisonRow>& rows, double sigmas, double floor,
                       bool relative_floor = false) {
  log << std::left << std::setw(20) << "id" << std::setw(8) << "time" << std::setw(14) << "observed" << std::setw(14)
      << "predicted" << std::setw(12) << "se" << std::setw(9) << "z" << "pass\n";
  for (const auto& r : rows) {
    const double f = relative_floor ? floor * std::abs(r.predicted) : floor;
    log << std::left << std::setprecision(6) << std::setw(20) << r.id << std::setw(8) << r.time << std::setw(14)
        << r.observed << std::setw(14) << r.predicted << std::setw(12) << r.se << std::setw(9) << std::setprecision(3)
        << r.z() << (r.within(sigmas, f) ? "yes" : "no") << '\n';
  }
}

inline void write_pairings(const RunContext& ctx, const EnsemblePairings& data) {
  if (!ctx.writes()) return;
  std::vector<PairingRecord> rows;
  for (std::size_t tr = 0; tr < data.density.size(); ++tr) {
    for (std::size_t ti = 0; ti < data.times.size(); ++ti) {
      for (std::size_t k = 0; k < data.density_ids.size(); ++k) {
        rows.push_back({tr, data.times[ti], "density:" + data.density_ids[k], data.density[tr][ti][k]});
      }
      for (std::size_t k = 0; k < data.current_ids.size(); ++k) {
        rows.push_back({tr, data.times[ti], "current:" + data.current_ids[k], data.current[tr][ti][k]});
      }
    }
  }
  auto out = detail::open_out(ctx.path("pairings.csv"));
  write_pairings_csv(out, rows);
}

inline std::vector<VectorTest> current_tests(const ExperimentSpec& s) {
  std::vector<VectorTest> v;
  for (const auto& id : s.currents) v.push_back({id, resolve_field(id)});
  return v;
}

inline nlohmann::json field_registry(const std::vector<VectorTest>& v) {
  nlohmann::json reg = nlohmann::json::object();
  for (const auto& t : v) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : t.g.terms()) {
      terms.push_back({{"component", term.mode.component}, {"z", {term.mode.z1, term.mode.z2}}, {"coef", term.coef}});
    }
    reg["current:" + t.id] = terms;
  }
  return reg;
}

inline bool run_simulate(RunContext& ctx) {
  const auto cfg = sim_config(ctx.spec);
  const auto scalars = default_density_tests();
  const auto vectors = current_tests(ctx.spec);
  const auto data = collect_pairings(cfg, scalars, vectors);
  ctx.log << "simulated " << cfg.ensemble_size << " trajectories, " << data.events << " events\n";
  for (std::size_t ti = 0; ti < data.times.size(); ++ti) {
    for (std::size_t k = 0; k < scalars.size(); ++k) {
      const auto st = sample_stats(column(data.density, ti, k));
      ctx.log << "t=" << data.times[ti] << " density:" << scalars[k].id << " mean=" << st.mean << " se=" << st.se << '\n';
    }
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      const auto st = sample_stats(column(data.current, ti, k));
      ctx.log << "t=" << data.times[ti] << " current:" << vectors[k].id << " mean=" << st.mean << " se=" << st.se << '\n';
    }
  }
  ctx.manifest["events"] = data.events;
  ctx.manifest["field_registry"] = field_registry(vectors);
  write_pairings(ctx, data);
  return true;
}

inline bool run_hydro_compare(RunContext& ctx) {
  const auto cfg = sim_config(ctx.spec);
  if (cfg.field) throw UsageError("field: hydro-compare runs the unperturbed model; use einstein for fields");
  const auto scalars = default_density_tests();
  const auto data = collect_pairings(cfg, scalars, {});
  const auto rows = compare_density(data, cfg, scalars);
  print_rows(ctx.log, rows, 4.0, 0.01);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.within(4.0, 0.01);
  if (ctx.writes()) write_comparison_csv(ctx.path("comparison.csv"), rows, 4.0, 0.01);
  write_pairings(ctx, data);
  ctx.manifest["events"] = data.events;
  return ok;
}

inline bool run_current_compare(RunContext& ctx) {
  const auto cfg = sim_config(ctx.spec);
  const auto vectors = current_tests(ctx.spec);
  const auto data = collect_pairings(cfg, {}, vectors);
  const auto rows = compare_current(data, cfg, vectors);
  print_rows(ctx.log, rows, 4.0, 0.01);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.within(4.0, 0.01);
  if (ctx.writes()) write_comparison_csv(ctx.path("comparison.csv"), rows, 4.0, 0.01);
  write_pairings(ctx, data);
  const auto norm = dual_norm_study(cfg, ctx.spec.k, ctx.spec.zmax);
  ctx.log << "E||J_t||^2_{-" << ctx.spec.k << "} (|z|<=" << ctx.spec.zmax << ") = " << norm.mean << " +- " << norm.se
          << '\n';
  ctx.manifest["dual_norm"] = {{"k", ctx.spec.k}, {"zmax", ctx.spec.zmax}, {"mean", norm.mean}, {"se", norm.se}};
  ctx.manifest["field_registry"] = field_registry(vectors);
  ctx.manifest["events"] = data.events;
  return ok;
}

// Uniform density under a constant weak field: mean current along e1 against
// 2 sigma(rho) E1 t; plus the drift-diffusion solver against the logit
// stationary profile for a gradient field.
inline bool run_einstein(RunContext& ctx) {
  auto spec = ctx.spec;
  if (spec.field == "none") spec.field = "drive-x";
  if (spec.profile == "sine") spec.profile = "uniform:0.3";
  const auto cfg = sim_config(spec);
  const auto vectors = std::vector<VectorTest>{{"unit-x", FourierVectorField::constant(1.0, 0.0)}};
  const auto data = collect_pairings(cfg, {}, vectors);
  const auto rows = compare_current(data, cfg, vectors);
  print_rows(ctx.log, rows, 4.0, 0.1, true);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.within(4.0, 0.1 * std::abs(r.predicted));

  const int m = 32;
  const double v0 = 0.1;
  const auto potential = [v0](const Point& u) { return v0 * fourier_basis(1, 0, u).value; };
  const auto target = logit_stationary_profile(potential, 0.3, m);
  const auto result = solve_drift_diffusion(sample_profile([](const Point&) { return 0.3; }, m),
                                            fourier_gradient(1, 0, v0), 1.0);
  double gap = 0.0;
  for (std::size_t k = 0; k < target.values.size(); ++k) gap = std::max(gap, std::abs(target.values[k] - result.rho.values[k]));
  const bool stationary_ok = gap <= 1e-6;
  ctx.log << "drift-diffusion stationary profile: max |rho - logistic(2V + c)| = " << gap << " after "
          << result.steps << " steps (" << (stationary_ok ? "PASS" : "FAIL") << ")\n";
  if (ctx.writes()) {
    write_comparison_csv(ctx.path("comparison.csv"), rows, 4.0, 0.1, true);
    auto out = detail::open_out(ctx.path("stationary_profile.csv"));
    write_density_csv(out, result.rho);
  }
  ctx.manifest["stationary_gap"] = gap;
  ctx.manifest["events"] = data.events;
  return ok && stationary_ok;
}

// Decomposes either the discretized --field or a seeded random field.
inline bool run_hodge(RunContext& ctx) {
  const auto& s = ctx.spec;
  const TorusLattice lat(s.n);
  DiscreteVectorField phi(s.n);
  if (s.field != "none") {
    phi = discretize_field(lat, resolve_field(s.field));
  } else {
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> nd;
    for (std::size_t id = 0; id < phi.size(); ++id) phi[id] = nd(rng);
  }
  const auto parts = hodge_decompose(lat, phi);
  const double norm = std::sqrt(inner(phi, phi));
  const double recon = (phi - parts.grad - parts.circ - parts.harm).max_abs() / std::max(phi.max_abs(), 1e-300);
  const double o1 = std::abs(inner(parts.grad, parts.circ)) / (norm * norm);
  const double o2 = std::abs(inner(parts.grad, parts.harm)) / (norm * norm);
  const double o3 = std::abs(inner(parts.circ, parts.harm)) / (norm * norm);
  ctx.log << std::setprecision(6) << "|phi|=" << norm << " |grad|=" << std::sqrt(inner(parts.grad, parts.grad))
          << " |circ|=" << std::sqrt(inner(parts.circ, parts.circ)) << " |harm|=" << std::sqrt(inner(parts.harm, parts.harm))
          << " harmonic=(" << parts.harmonic_coef[0] << "," << parts.harmonic_coef[1] << ")\n"
          << "reconstruction=" << recon << " orthogonality=" << std::max({o1, o2, o3}) << " residual=" << parts.residual
          << '\n';
  if (ctx.writes()) {
    const std::pair<const char*, const DiscreteVectorField*> outputs[] = {
        {"field", &phi}, {"gradient", &parts.grad}, {"circulation", &parts.circ}, {"harmonic", &parts.harm}};
    for (const auto& [name, f] : outputs) {
      auto out = detail::open_out(ctx.path(std::string(name) + ".csv"));
      write_field_csv(out, *f);
    }
  }
  ctx.manifest["reconstruction"] = recon;
  ctx.manifest["orthogonality"] = std::max({o1, o2, o3});
  return recon <= 1e-10 && std::max({o1, o2, o3}) <= 1e-9;
}

// Returns the process exit code: 0 pass, 1 check failure, 2 usage error.
inline int run_experiment(const ExperimentSpec& spec, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  RunContext ctx{spec, log, nlohmann::json::object()};
  ctx.manifest["spec"] = to_json(spec);
  ctx.manifest["rng"] = kRngName;
  ctx.manifest["status"] = "incomplete";
  if (ctx.writes()) {
    write_json(ctx.path("manifest.json"), ctx.manifest);
    auto ini = detail::open_out(ctx.path("experiment.ini"));
    ini << to_ini(spec);
  }
  bool ok = false;
  try {
    if (spec.subcommand == "verify") ok = run_verify(ctx);
    else if (spec.subcommand == "simulate") ok = run_simulate(ctx);
    else if (spec.subcommand == "hydro-compare") ok = run_hydro_compare(ctx);
    else if (spec.subcommand == "current-compare") ok = run_current_compare(ctx);
    else if (spec.subcommand == "einstein") ok = run_einstein(ctx);
    else if (spec.subcommand == "hodge") ok = run_hodge(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    ctx.manifest["error"] = e.what();
    if (ctx.writes()) write_json(ctx.path("manifest.json"), ctx.manifest);
    return 1;
  }
  ctx.manifest["status"] = "complete";
  ctx.manifest["pass"] = ok;
  if (ctx.writes()) write_json(ctx.path("manifest.json"), ctx.manifest);
  log << (ok ? "RESULT: PASS" : "RESULT: FAIL") << '\n';
  return ok ? 0 : 1;
}

}  // namespace rotex
