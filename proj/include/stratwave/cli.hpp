#pragma once

// Command runner behind the stratwave executable. Each command produces a JSON report,
// a short text summary and, for some commands, extra artifacts.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"

namespace stratwave {

enum ExitStatus : int { exit_ok = 0, exit_violation = 1, exit_inconclusive = 2, exit_usage = 3 };

struct RunOutcome {
  int status = exit_ok;
  json report;
  std::string summary;
  std::map<std::string, std::string> artifacts; // file name -> contents
};

inline const std::vector<std::string> &command_names() {
  static const std::vector<std::string> names = {"laminar", "stokes", "spectrum", "al2", "sweep",
                                                 "pm23",    "bloch-check", "floquet", "verdict"};
  return names;
}

struct Setup {
  FluidProfiles prof;
  LaminarProfile lp;
  std::optional<Bifurcation> bif;
  std::optional<TransverseMode> mode;
  WaveField field;
  bool genuine_wave = false; // first-order Stokes field at the bifurcation period
};

inline Setup make_setup(const RunConfig &cfg, bool force_laminar = false) {
  cfg.validate();
  Setup s;
  ProfileParameters pp = cfg.profile;
  pp.p0 = cfg.flow.p0;
  s.prof = make_profiles(cfg.profile_kind, pp);
  s.lp = solve_laminar(s.prof, cfg.flow);
  if (force_laminar || cfg.field == "laminar") {
    s.field = laminar_field(s.lp, cfg.nx, cfg.ny);
    return s;
  }
  s.bif = bifurcation_tau(s.lp, s.prof);
  if (!s.bif) throw SolveFailure("no bifurcation wavenumber found for this laminar flow", 0.0);
  s.mode = cfg.period_fraction == 1.0 ? s.bif->mode : transverse_mode(s.lp, s.prof, s.bif->tau / cfg.period_fraction);
  s.field = stokes_field(s.lp, *s.mode, cfg.amplitude, cfg.nx, cfg.ny);
  s.genuine_wave = cfg.period_fraction == 1.0 && cfg.amplitude > 0.0;
  return s;
}

inline std::vector<double> tau_fractions(int samples) {
  std::vector<double> f;
  for (int k = 1; k <= samples; ++k) f.push_back(static_cast<double>(k) / (samples + 1));
  return f;
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline json field_header(const Setup &s) {
  json j = to_json(s.field, false);
  if (s.bif) j["bifurcation_tau"] = s.bif->tau;
  j["genuine_wave"] = s.genuine_wave;
  return j;
}

inline RunOutcome run_laminar(const RunConfig &cfg) {
  const auto s = make_setup(cfg, true);
  RunOutcome o;
  const auto res = pde_residual(s.field, s.prof);
  const bool ok = s.lp.monotone && s.lp.residual <= 1e-8;
  o.status = ok ? exit_ok : exit_violation;
  o.report = {{"profile", to_json(s.lp)}, {"field_residual", to_json(res)}};
  o.summary = "laminar: R = " + fmt(s.lp.params.R) + ", monotone = " + (s.lp.monotone ? "yes" : "no") +
              ", shooting residual = " + fmt(s.lp.residual) + "\n";
  return o;
}

inline RunOutcome run_stokes(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  RunOutcome o;
  (void)coefficients(s.field, s.prof); // rejects fields with psi_y >= 0 on the surface
  const auto res = pde_residual(s.field, s.prof);
  o.report = {{"field", to_json(s.field)}, {"bifurcation_tau", s.bif ? json(s.bif->tau) : json(nullptr)},
              {"residual", to_json(res)}};
  o.summary = "stokes: t = " + fmt(s.field.amplitude) + ", period = " + fmt(s.field.grid.length) + ", interior residual = " +
              fmt(res.interior) + ", bernoulli residual = " + fmt(res.bernoulli) + "\n";
  return o;
}

inline RunOutcome run_spectrum(const RunConfig &cfg) {
  using BC = BoundaryCondition;
  const auto s = make_setup(cfg);
  const Mesh mesh = mesh_for(s.field, s.prof);
  RunOutcome o;
  json fam, named, bloch = json::array();
  bool ok = true;
  const std::vector<std::pair<std::string, BC>> families = {
      {"even", BC::PeriodicEven}, {"full", BC::PeriodicFull}, {"N", BC::NeumannSides}, {"D", BC::DirichletSides},
      {"DD", BC::HalfDD},         {"DN", BC::HalfDN},         {"ND", BC::HalfND},      {"NN", BC::HalfNN}};
  for (const auto &[name, bc] : families) {
    const auto r = mu_spectrum(mesh, bc, cfg.eigen_count, cfg.tol_zero);
    json e = to_json(r);
    e["bc"] = to_string(bc);
    fam[name] = e;
    for (int j = 0; j < r.size(); ++j) {
      const std::string key = "mu" + std::to_string(j + 1) + (name == "even" ? "" : name);
      named[key] = {{"value", r.eigenvalues[j]}, {"family", name}, {"index", j}};
    }
    if (r.residuals.size() && r.residuals.maxCoeff() > 1e-6 * std::max(1.0, r.norm_A)) ok = false;
  }
  const double ts = 2.0 * pi / mesh.length;
  for (double frac : tau_fractions(cfg.tau_samples)) {
    const auto r = bloch_spectrum(mesh, frac * ts, cfg.j_max, cfg.tol_zero);
    bloch.push_back({{"tau", frac * ts}, {"eigenvalues", to_json(r.eigenvalues)}});
  }
  o.status = ok ? exit_ok : exit_violation;
  o.report = {{"field", field_header(s)}, {"families", fam}, {"named", named}, {"bloch", bloch}};
  const auto &ev = fam["even"]["eigenvalues"];
  o.summary = "spectrum: mu1 = " + fmt(ev[0].get<double>()) + ", mu2 = " + fmt(ev[1].get<double>()) +
              ", eigen residuals " + (ok ? "within tolerance" : "too large") + "\n";
  return o;
}

inline RunOutcome run_al2(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  const auto rep = side_relation_report(s.field, mesh_for(s.field, s.prof), s.genuine_wave, cfg.eigen_count, cfg.tol_zero);
  RunOutcome o;
  bool indeterminate = false;
  for (const auto &r : rep.relations) indeterminate |= r.status == "indeterminate";
  o.status = !rep.passed() ? exit_violation : indeterminate ? exit_inconclusive : exit_ok;
  o.report = {{"field", field_header(s)}, {"relations", to_json(rep)}};
  std::ostringstream os;
  for (const auto &r : rep.relations) os << "  [" << r.status << "] " << r.name << "  (" << fmt(r.lhs) << " vs " << fmt(r.rhs) << ")\n";
  o.summary = "al2: " + std::to_string(rep.relations.size()) + " relations, " + std::to_string(rep.failures().size()) +
              " violated\n" + os.str();
  return o;
}

inline RunOutcome run_sweep(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  const auto sw = bloch_sweep(mesh_for(s.field, s.prof), tau_fractions(cfg.tau_samples), cfg.j_max, cfg.margin, cfg.tol_zero);
  RunOutcome o;
  o.status = !sw.weak_interlacing() ? exit_violation : !sw.strict_interlacing() ? exit_inconclusive : exit_ok;
  const std::string verdict = o.status == exit_ok ? "pass" : o.status == exit_violation ? "fail" : "within-margin";
  o.report = {{"field", field_header(s)}, {"sweep", to_json(sw)}, {"interlacing", verdict}};
  std::ostringstream csv;
  write_sweep_csv(csv, sw);
  o.artifacts["sweep.csv"] = csv.str();
  o.summary = "sweep: " + std::to_string(sw.taus.size()) + " tau samples, interlacing = " + verdict +
              ", criterion mu1 < 0 < mu2: " + (sw.criterion_holds ? "holds" : "fails") + "\n";
  return o;
}

inline RunOutcome run_pm23(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  const double ts = 2.0 * pi / s.field.grid.length;
  const std::vector<std::tuple<std::string, std::function<double(double)>, std::function<double(double)>>> weights = {
      {"a=1,b=1", [](double) { return 1.0; }, [](double) { return 1.0; }},
      {"a=1,b=2", [](double) { return 1.0; }, [](double) { return 2.0; }},
      {"a=1+0.1cos(tau* x),b=1", [ts](double x) { return 1.0 + 0.1 * std::cos(ts * x); }, [](double) { return 1.0; }}};
  std::vector<int> ms = {1};
  if (cfg.period_multiple > 1) ms.push_back(cfg.period_multiple);
  RunOutcome o;
  json rows = json::array();
  bool equal = true, stable = true;
  std::ostringstream os;
  for (int m : ms) {
    const Mesh mesh = mesh_for(s.field, s.prof, m);
    for (const auto &[name, a, b] : weights) {
      const auto c = negative_count_compare(mesh, a, b, BoundaryCondition::PeriodicEven, cfg.tol_zero);
      json r = to_json(c);
      r["m"] = m;
      r["weights"] = name;
      rows.push_back(r);
      equal &= c.equal;
      stable &= c.stable;
      os << "  m = " << m << ", " << name << ": n_mu = " << c.n_mu << ", n_theta = " << c.n_theta << '\n';
    }
  }
  o.status = !equal ? exit_violation : !stable ? exit_inconclusive : exit_ok;
  o.report = {{"field", field_header(s)}, {"comparisons", rows}};
  o.summary = std::string("pm23: counts ") + (equal ? "agree" : "differ") + "\n" + os.str();
  return o;
}

inline RunOutcome run_bloch_check(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  const auto c = coefficients(s.field, s.prof);
  const int W = 2 * cfg.bloch_M + 1;
  const GridFunction v = random_grid_function(W * s.field.grid.nx, s.field.grid.ny + 1, cfg.seed);
  const auto r = bloch_identities(v, cfg.bloch_M, s.field, c);
  RunOutcome o;
  const bool ok = r.roundtrip_error <= 1e-12 && r.norm_identity_error <= 1e-12 && r.commutation_A <= 1e-10 &&
                  r.commutation_B <= 1e-10;
  o.status = ok ? exit_ok : exit_violation;
  o.report = {{"field", field_header(s)}, {"seed", cfg.seed}, {"identities", to_json(r)},
              {"thresholds", {{"roundtrip", 1e-12}, {"norm_identity", 1e-12}, {"commutation", 1e-10}}}};
  o.artifacts["bloch_stack.json"] = to_json(bloch_forward(v, cfg.bloch_M, s.field.grid.length)).dump() + "\n";
  o.summary = "bloch-check: M = " + std::to_string(cfg.bloch_M) + ", roundtrip = " + fmt(r.roundtrip_error) +
              ", norm identity = " + fmt(r.norm_identity_error) + ", commutation = " +
              fmt(std::max(r.commutation_A, r.commutation_B)) + "\n";
  return o;
}

inline RunOutcome run_floquet(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  RunOutcome o;
  try {
    const auto jc = chain_report(s.field, s.prof, s.mode, cfg.curvature, 1e-8, cfg.tol_zero);
    o.status = jc.chain_length == 2 ? exit_ok : exit_inconclusive;
    o.report = {{"field", field_header(s)}, {"chain", to_json(jc)}};
    o.summary = "floquet: LHS = " + fmt(jc.lhs_gauss) + " (nodal " + fmt(jc.lhs_nodal) + "), " + jc.verdict +
                (jc.c ? ", c = " + fmt(*jc.c) : std::string()) + "\n";
  } catch (const SolveFailure &e) {
    o.status = exit_inconclusive;
    o.report = {{"field", field_header(s)}, {"error", e.what()}};
    o.summary = std::string("floquet: refused, ") + e.what() + "\n";
  }
  return o;
}

inline RunOutcome run_verdict(const RunConfig &cfg) {
  const auto s = make_setup(cfg);
  int m = cfg.period_multiple;
  if (m < 3 || m % 2 == 0) throw InvalidInput("verdict needs an odd period_multiple >= 3");
  const auto v = uniqueness_verdict(mesh_for(s.field, s.prof), mesh_for(s.field, s.prof, m), 12, cfg.tol_zero);
  RunOutcome o;
  o.status = v.decomposition_error > 1e-8 ? exit_violation : v.inconclusive ? exit_inconclusive : exit_ok;
  o.report = {{"field", field_header(s)}, {"verdict", to_json(v)}};
  o.summary = "verdict: mu1 = " + fmt(v.mu1) + ", mu2 = " + fmt(v.mu2) + ", criterion " +
              (v.criterion_holds ? "holds" : "fails") + ", " + std::to_string(m) + "-period min |mu| = " + fmt(v.min_abs_mu) +
              ", decomposition error = " + fmt(v.decomposition_error) + "\n";
  return o;
}

} // namespace detail

inline RunOutcome run(const std::string &command, const RunConfig &cfg) {
  cfg.validate();
  RunOutcome o;
  if (command == "laminar") o = detail::run_laminar(cfg);
  else if (command == "stokes") o = detail::run_stokes(cfg);
  else if (command == "spectrum") o = detail::run_spectrum(cfg);
  else if (command == "al2") o = detail::run_al2(cfg);
  else if (command == "sweep") o = detail::run_sweep(cfg);
  else if (command == "pm23") o = detail::run_pm23(cfg);
  else if (command == "bloch-check") o = detail::run_bloch_check(cfg);
  else if (command == "floquet") o = detail::run_floquet(cfg);
  else if (command == "verdict") o = detail::run_verdict(cfg);
  else throw InvalidInput("unknown command '" + command + "'");
  o.report = report_envelope(command, cfg, o.status, std::move(o.report));
  return o;
}

inline void write_outcome(const std::string &command, const RunOutcome &o, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string &name, const std::string &text) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
  };
  put(command + ".json", o.report.dump(2) + "\n");
  put(command + ".txt", o.summary);
  for (const auto &[name, text] : o.artifacts) put(name, text);
}

} // namespace stratwave
