#pragma once

// JSON configuration and report serialization (nlohmann::json).

#include <complex>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bloch.hpp"
#include "floquet.hpp"
#include "spectra.hpp"

namespace stratwave {

using json = nlohmann::ordered_json;

inline constexpr int report_schema_version = 1;

struct RunConfig {
  ProfileKind profile_kind = ProfileKind::Constant;
  ProfileParameters profile;
  FlowParameters flow = [] {
    FlowParameters p;
    p.g = 2.0;
    return p;
  }();
  std::string field = "stokes"; // or "laminar"
  double period_fraction = 1.0; // Stokes period as a multiple of 2 pi / kappa0
  double amplitude = 0.01;
  int nx = 48, ny = 24;
  int tau_samples = 9;
  int period_multiple = 3;
  int j_max = 4;
  int eigen_count = 6;
  double tol_zero = default_tol_zero;
  double margin = 1e-6;
  int bloch_M = 2;
  unsigned seed = 1;
  std::optional<double> curvature; // c in lambda = 1 - c t^2, fitted when absent
  std::string out = "out";

  void validate() const {
    flow.validate();
    if (field != "stokes" && field != "laminar") throw InvalidInput("field must be 'stokes' or 'laminar'");
    if (!(period_fraction > 0.0)) throw InvalidInput("period_fraction must be positive");
    if (!(amplitude >= 0.0)) throw InvalidInput("amplitude must be non-negative");
    if (nx <= 0 || nx % 4 != 0) throw InvalidInput("grid.nx must be a positive multiple of 4");
    if (ny <= 0 || ny % 2 != 0) throw InvalidInput("grid.ny must be positive and even");
    if (tau_samples < 1) throw InvalidInput("tau_samples must be at least 1");
    if (period_multiple < 1) throw InvalidInput("period_multiple must be at least 1");
    if (j_max < 1 || eigen_count < 1) throw InvalidInput("eigenvalue counts must be positive");
    if (!(tol_zero > 0.0) || !(margin >= 0.0)) throw InvalidInput("tolerances must be positive");
    if (bloch_M < 0) throw InvalidInput("bloch_M must be non-negative");
  }
};

// ---------------------------------------------------------------------------------------------
// config parsing with key diagnostics

namespace detail {

inline std::string line_col(const std::string &text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

class Reader {
public:
  Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidInput(where() + "expected an object");
  }

  template <typename T>
  void get(const std::string &key, T &out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    const json &v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw InvalidInput("expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw InvalidInput("expected an integer");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw InvalidInput("expected a string");
      }
      out = v.get<T>();
    } catch (const std::exception &e) {
      throw InvalidInput(where(key) + e.what());
    }
  }

  template <typename T>
  void get(const std::string &key, std::optional<T> &out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  std::optional<Reader> child(const std::string &key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Reader(j_.at(key), path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto &[k, v] : j_.items())
      if (!seen_.count(k)) throw InvalidInput(where(k) + "unknown key");
  }

private:
  std::string where(const std::string &key = "") const {
    std::string p = path_;
    if (!key.empty()) p = p.empty() ? key : p + "." + key;
    return p.empty() ? "config: " : "config key '" + p + "': ";
  }

  const json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

} // namespace detail

// keys absent from j keep the values already in cfg
inline void apply_config(RunConfig &cfg, const json &j) {
  detail::Reader r(j, "");
  if (auto p = r.child("profile")) {
    std::string kind = to_string(cfg.profile_kind);
    p->get("kind", kind);
    try {
      cfg.profile_kind = profile_kind_from_string(kind);
    } catch (const InvalidInput &e) {
      throw InvalidInput(std::string("config key 'profile.kind': ") + e.what());
    }
    p->get("rho0", cfg.profile.rho0);
    p->get("slope", cfg.profile.slope);
    p->get("beta0", cfg.profile.beta0);
    p->get("rho_samples", cfg.profile.rho_samples);
    p->get("beta_samples", cfg.profile.beta_samples);
    p->finish();
  }
  if (auto f = r.child("flow")) {
    f->get("d", cfg.flow.d);
    f->get("g", cfg.flow.g);
    f->get("p0", cfg.flow.p0);
    f->get("Lambda", cfg.flow.Lambda);
    f->finish();
  }
  if (auto g = r.child("grid")) {
    g->get("nx", cfg.nx);
    g->get("ny", cfg.ny);
    g->finish();
  }
  r.get("field", cfg.field);
  r.get("period_fraction", cfg.period_fraction);
  r.get("amplitude", cfg.amplitude);
  r.get("tau_samples", cfg.tau_samples);
  r.get("period_multiple", cfg.period_multiple);
  r.get("j_max", cfg.j_max);
  r.get("eigen_count", cfg.eigen_count);
  r.get("tol_zero", cfg.tol_zero);
  r.get("margin", cfg.margin);
  r.get("bloch_M", cfg.bloch_M);
  r.get("seed", cfg.seed);
  r.get("curvature", cfg.curvature);
  r.get("out", cfg.out);
  r.finish();
}

inline json parse_json_text(const std::string &text, const std::string &source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw InvalidInput(source + ":" + detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
}

inline RunConfig load_config(const std::string &path, RunConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config(cfg, parse_json_text(ss.str(), path));
  return cfg;
}

inline json to_json(const RunConfig &c) {
  json p = {{"kind", to_string(c.profile_kind)}, {"rho0", c.profile.rho0}, {"slope", c.profile.slope}, {"beta0", c.profile.beta0}};
  if (c.profile_kind == ProfileKind::CustomSampled) {
    p["rho_samples"] = c.profile.rho_samples;
    p["beta_samples"] = c.profile.beta_samples;
  }
  return {{"profile", p},
          {"flow", {{"d", c.flow.d}, {"g", c.flow.g}, {"p0", c.flow.p0}, {"Lambda", c.flow.Lambda}}},
          {"field", c.field},
          {"period_fraction", c.period_fraction},
          {"amplitude", c.amplitude},
          {"grid", {{"nx", c.nx}, {"ny", c.ny}}},
          {"tau_samples", c.tau_samples},
          {"period_multiple", c.period_multiple},
          {"j_max", c.j_max},
          {"eigen_count", c.eigen_count},
          {"tol_zero", c.tol_zero},
          {"margin", c.margin},
          {"bloch_M", c.bloch_M},
          {"seed", c.seed},
          {"curvature", c.curvature ? json(*c.curvature) : json(nullptr)},
          {"out", c.out}};
}

// ---------------------------------------------------------------------------------------------
// report serialization

inline json to_json(const Eigen::VectorXd &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json to_json(const GridFunction &g) {
  json rows = json::array();
  for (int i = 0; i < g.rows(); ++i) {
    const Eigen::ArrayXd r = g.row(i).transpose();
    rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
  }
  return rows;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ComplexGridFunction &g) {
  json rows = json::array();
  for (int i = 0; i < g.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < g.cols(); ++j) r.push_back(to_json(g(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline json to_json(const BlochStack &s) {
  json comps = json::array();
  for (int m = -s.M; m <= s.M; ++m) comps.push_back({{"m", m}, {"tau", s.tau(m)}, {"values", to_json(s[m])}});
  return {{"M", s.M}, {"length", s.length}, {"components", comps}};
}

inline json to_json(const PdeResidual &r) {
  return {{"interior", r.interior}, {"bernoulli", r.bernoulli}, {"kinematic", r.kinematic}};
}

inline json to_json(const LaminarProfile &lp, int samples = 41) {
  json ys = json::array(), ps = json::array(), pys = json::array();
  const double d = lp.params.d;
  for (int k = 0; k < samples; ++k) {
    const double y = -d + d * k / (samples - 1);
    ys.push_back(y);
    ps.push_back(lp.psi(y));
    pys.push_back(lp.psi_y(y));
  }
  return {{"R", lp.params.R}, {"slope_bottom", lp.slope_bottom}, {"monotone", lp.monotone}, {"shooting_residual", lp.residual},
          {"y", ys}, {"psi", ps}, {"psi_y", pys}};
}

inline json to_json(const WaveField &f, bool values = true) {
  json j = {{"nx", f.grid.nx}, {"ny", f.grid.ny}, {"length", f.grid.length}, {"depth", f.grid.depth},
            {"amplitude", f.amplitude}, {"tau", f.tau}};
  if (values) {
    j["xi"] = to_json(Eigen::VectorXd(f.xi.matrix()));
    j["psi"] = to_json(f.psi);
  }
  return j;
}

template <typename Scalar>
json to_json(const EigenResult<Scalar> &r) {
  json flags = json::array();
  for (bool z : r.zero_flags) flags.push_back(z);
  return {{"eigenvalues", to_json(r.eigenvalues)}, {"residuals", to_json(r.residuals)}, {"negative_count", r.negative_count},
          {"zero_flags", flags}, {"orthonormality_error", r.orthonormality_error}, {"norm_A", r.norm_A}, {"tol_zero", r.tol_zero}};
}

inline json to_json(const Relation &r) {
  return {{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"op", r.op}, {"tolerance", r.tolerance}, {"status", r.status}};
}

inline json to_json(const SideRelationReport &r) {
  json spectra, named, rel = json::array();
  for (const auto &[k, v] : r.spectra) spectra[k] = to_json(v);
  for (const auto &[k, v] : r.named) named[k] = v;
  for (const auto &x : r.relations) rel.push_back(to_json(x));
  return {{"genuine_wave", r.genuine_wave}, {"mu2D_bound", r.mu2D_bound}, {"psi_x_correlation", r.psi_x_correlation},
          {"tol_zero", r.tol_zero}, {"spectra", spectra}, {"named", named}, {"relations", rel}, {"passed", r.passed()}};
}

inline json to_json(const CountComparison &c) {
  return {{"n_mu", c.n_mu}, {"n_theta", c.n_theta}, {"equal", c.equal}, {"stable", c.stable},
          {"hform_lambda_min", c.hform.lambda_min}, {"hform_positive", c.hform.positive}, {"tol_zero", c.tol_zero}};
}

inline json to_json(const BlochIdentityReport &r) {
  return {{"M", r.M}, {"roundtrip_error", r.roundtrip_error}, {"norm_identity_error", r.norm_identity_error},
          {"commutation_A", r.commutation_A}, {"commutation_B", r.commutation_B}, {"h2_ratio", r.h2_ratio}};
}

inline json to_json(const BlochSweep &s) {
  json checks = json::array(), curves = json::array();
  for (const auto &c : s.checks)
    checks.push_back({{"j", c.j}, {"tau", c.tau}, {"lower", c.lower}, {"value", c.value}, {"upper", c.upper},
                      {"weak", c.weak}, {"strict", c.strict}});
  for (const auto &c : s.curves) curves.push_back(to_json(c));
  return {{"tau_star", s.tau_star}, {"taus", s.taus}, {"curves", curves}, {"mu_N", to_json(s.mu_N)}, {"mu_D", to_json(s.mu_D)},
          {"mu_full", to_json(s.mu_full)}, {"margin", s.margin}, {"criterion_holds", s.criterion_holds},
          {"zero_free", s.zero_free}, {"weak_interlacing", s.weak_interlacing()},
          {"strict_interlacing", s.strict_interlacing()},
          {"strict_failures_only_at_half_period", s.strict_failures_only_at_half_period()}, {"checks", checks}};
}

inline json to_json(const UniquenessVerdict &v) {
  return {{"mu1", v.mu1}, {"mu2", v.mu2}, {"criterion_holds", v.criterion_holds}, {"inconclusive", v.inconclusive},
          {"m", v.m}, {"multi_spectrum", to_json(v.multi_spectrum)}, {"bloch_union", to_json(v.bloch_union)},
          {"min_abs_mu", v.min_abs_mu}, {"decomposition_error", v.decomposition_error},
          {"subharmonic_excluded", v.subharmonic_excluded}, {"tol_zero", v.tol_zero}};
}

inline json to_json(const JordanChain &c, bool fields = false) {
  auto opt = [](const std::optional<double> &x) { return x ? json(*x) : json(nullptr); };
  json j = {{"amplitude", c.amplitude}, {"tau_star", c.tau_star}, {"mu1", c.mu1}, {"mu2", c.mu2},
            {"criterion_holds", c.criterion_holds}, {"algebraic_residual", c.algebraic_residual},
            {"interior_residual", c.interior_residual}, {"surface_residual", c.surface_residual},
            {"lhs_gauss", c.lhs_gauss}, {"lhs_nodal", c.lhs_nodal}, {"mode_correlation", opt(c.mode_correlation)},
            {"c", opt(c.c)}, {"lhs_leading", opt(c.lhs_leading)}, {"tol", c.tol}, {"chain_length", c.chain_length},
            {"verdict", c.verdict}};
  if (fields) {
    j["u0"] = to_json(c.u0);
    j["u1"] = to_json(c.u1);
  }
  return j;
}

inline json report_envelope(const std::string &command, const RunConfig &cfg, int status, json results) {
  return {{"schema_version", report_schema_version}, {"command", command}, {"status", status},
          {"config", to_json(cfg)}, {"results", std::move(results)}};
}

} // namespace stratwave
