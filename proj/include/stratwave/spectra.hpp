#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "eigensolve.hpp"
#include "flow.hpp"
#include "linearize.hpp"

namespace stratwave {

inline Mesh mesh_for(const WaveField &f, const FluidProfiles &prof, int m = 1) {
  return build_mesh(f, coefficients(f, prof), m);
}

inline EigenResult<double> mu_spectrum(const Mesh &mesh, BoundaryCondition bc, int k = -1, double tol_zero = default_tol_zero,
                                       const AssemblyOptions &opt = {}, bool vectors = true) {
  if (bc == BoundaryCondition::Bloch) throw InvalidInput("use bloch_spectrum for quasi-periodic problems");
  const auto P = assemble<double>(mesh, bc, opt);
  return solve_gen<double>(P.A, P.M_vol, k, tol_zero, vectors);
}

inline EigenResult<cplx> bloch_spectrum(const Mesh &mesh, double tau, int k = -1, double tol_zero = default_tol_zero,
                                        bool vectors = false) {
  AssemblyOptions opt;
  opt.tau = tau;
  const auto P = assemble<cplx>(mesh, BoundaryCondition::Bloch, opt);
  return solve_gen<cplx>(P.A, P.M_vol, k, tol_zero, vectors);
}

// a(u, v) = theta s_b(u, v): the interior dofs are eliminated (Schur complement), leaving a
// surface problem with the positive surface mass.
inline EigenResult<double> steklov_spectrum(const Mesh &mesh, BoundaryCondition bc, const AssemblyOptions &opt = {}, int k = -1,
                                            double tol_zero = default_tol_zero, bool raw_sign = false) {
  const auto P = assemble<double>(mesh, bc, opt);
  std::vector<int> S, I;
  for (int i = 0; i < P.ndof; ++i) (P.surface[i] ? S : I).push_back(i);
  const int ns = static_cast<int>(S.size()), ni = static_cast<int>(I.size());
  Eigen::MatrixXd Ass(ns, ns), Asi(ns, ni), Aii(ni, ni), Mss(ns, ns);
  for (int a = 0; a < ns; ++a) {
    for (int b = 0; b < ns; ++b) {
      Ass(a, b) = P.A(S[a], S[b]);
      Mss(a, b) = P.M_surf(S[a], S[b]);
    }
    for (int b = 0; b < ni; ++b) Asi(a, b) = P.A(S[a], I[b]);
  }
  for (int a = 0; a < ni; ++a)
    for (int b = 0; b < ni; ++b) Aii(a, b) = P.A(I[a], I[b]);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Aii);
  Eigen::MatrixXd Sc = Ass - Asi * lu.solve(Asi.transpose());
  Sc = (0.5 * (Sc + Sc.transpose())).eval();
  auto r = solve_gen<double>(Sc, Mss, -1, tol_zero);
  if (raw_sign) {
    // the unflipped convention pairs the surface mass with weight b / psi_y < 0
    r.eigenvalues = (-r.eigenvalues).reverse().eval();
    r.eigenvectors = r.eigenvectors.rowwise().reverse().eval();
    r.residuals = r.residuals.reverse().eval();
    r.negative_count = r.count_below(tol_zero);
    std::reverse(r.zero_flags.begin(), r.zero_flags.end());
  }
  if (k >= 0 && k < r.size()) {
    r.eigenvalues = r.eigenvalues.head(k).eval();
    r.eigenvectors = r.eigenvectors.leftCols(k).eval();
    r.residuals = r.residuals.head(k).eval();
    r.zero_flags.resize(k);
  }
  return r;
}

struct HformResult {
  double lambda_min = 0.0;
  bool positive = false;
};

// smallest eigenvalue of a(u, u) / (u, u) on functions vanishing at the bottom and on the surface
inline HformResult hform_positivity(const Mesh &mesh, double tol_zero = default_tol_zero) {
  AssemblyOptions opt;
  opt.dirichlet_top = true;
  const auto r = mu_spectrum(mesh, BoundaryCondition::PeriodicFull, 1, tol_zero, opt, false);
  return {r.eigenvalues[0], r.eigenvalues[0] > tol_zero};
}

struct CountComparison {
  int n_mu = 0, n_theta = 0;
  bool equal = false;
  bool stable = false; // counts unchanged under tol_zero halving
  HformResult hform;
  double tol_zero = default_tol_zero;
};

inline CountComparison negative_count_compare(const Mesh &mesh, std::function<double(double)> a_weight,
                                              std::function<double(double)> b_weight,
                                              BoundaryCondition bc = BoundaryCondition::PeriodicEven,
                                              double tol_zero = default_tol_zero) {
  AssemblyOptions opt;
  opt.vol_weight = std::move(a_weight);
  opt.surf_weight = std::move(b_weight);
  const auto mu = mu_spectrum(mesh, bc, -1, tol_zero, opt, false);
  const auto th = steklov_spectrum(mesh, bc, opt, -1, tol_zero);
  CountComparison c;
  c.tol_zero = tol_zero;
  c.n_mu = mu.negative_count;
  c.n_theta = th.negative_count;
  c.equal = c.n_mu == c.n_theta;
  c.stable = mu.count_below(0.5 * tol_zero) == c.n_mu && th.count_below(0.5 * tol_zero) == c.n_theta;
  c.hform = hform_positivity(mesh, tol_zero);
  return c;
}

// ---------------------------------------------------------------------------------------------

struct Relation {
  std::string name;
  double lhs = 0.0, rhs = 0.0, tolerance = 0.0;
  std::string op;     // "==", "<"
  std::string status; // "holds", "violated", "indeterminate", "skipped"
};

namespace detail {

inline double eq_tolerance(double a, double b) { return 1e-8 * std::max({1.0, std::abs(a), std::abs(b)}); }

inline Relation rel_equal(std::string name, double a, double b, double tol) {
  return {std::move(name), a, b, tol, "==", std::abs(a - b) <= tol ? "holds" : "violated"};
}

// strict a < b with margin; gaps inside the margin are reported, not failed
inline Relation rel_less(std::string name, double a, double b, double margin) {
  const std::string st = a < b - margin ? "holds" : (a < b + margin ? "indeterminate" : "violated");
  return {std::move(name), a, b, margin, "<", st};
}

} // namespace detail

// physical psi_x on the mesh lattice: spectral in x, fourth order in yhat
inline GridFunction psi_x_lattice(const WaveField &f, const Mesh &mesh) {
  const auto m = f.metric();
  const GridFunction px = dx_spectral(f.psi, f.grid.length, 1);
  const GridFunction py = stencil::dy4<double>(f.psi, f.grid.hy());
  GridFunction u(mesh.columns() + 1, mesh.ny + 1);
  for (int c = 0; c <= mesh.columns(); ++c) {
    const int i = mesh.field_index(c);
    for (int r = 0; r <= mesh.ny; ++r) u(c, r) = px(i, r) - m.a(i, f.grid.yhat(r)) * py(i, r);
  }
  return u;
}

// |<x, y>_M| / (|x|_M |y|_M)
template <typename Scalar>
double m_correlation(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &M, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &y) {
  const Scalar xy = x.dot(M * y);
  const double xx = std::real(x.dot(M * x)), yy = std::real(y.dot(M * y));
  if (xx <= 0.0 || yy <= 0.0) return 0.0;
  return std::abs(xy) / std::sqrt(xx * yy);
}

struct SideRelationReport {
  std::map<std::string, Eigen::VectorXd> spectra; // lowest eigenvalues per family
  std::map<std::string, double> named;
  std::vector<Relation> relations;
  bool genuine_wave = false;
  double mu2D_bound = 0.0;       // C (h^2 + t^2)
  double psi_x_correlation = 0.0; // eigenvector of mu_2D against psi_x
  double tol_zero = default_tol_zero;

  std::vector<std::string> failures() const {
    std::vector<std::string> r;
    for (const auto &x : relations)
      if (x.status == "violated") r.push_back(x.name);
    return r;
  }
  bool passed() const { return failures().empty(); }
};

// Measured |mu_2D| on first-order fields is about 39 t^2 + O(h^4); C = 50 bounds it.
inline constexpr double mu2D_bound_constant = 50.0;

inline SideRelationReport side_relation_report(const WaveField &f, const Mesh &mesh, bool genuine_wave, int k = 6,
                                  double tol_zero = default_tol_zero, double bound_constant = mu2D_bound_constant) {
  using BC = BoundaryCondition;
  SideRelationReport rep;
  rep.genuine_wave = genuine_wave;
  rep.tol_zero = tol_zero;
  const std::vector<std::pair<std::string, BC>> families = {
      {"N", BC::NeumannSides}, {"D", BC::DirichletSides}, {"DD", BC::HalfDD}, {"DN", BC::HalfDN},
      {"ND", BC::HalfND},      {"NN", BC::HalfNN},        {"even", BC::PeriodicEven}, {"full", BC::PeriodicFull}};
  std::map<std::string, double> noise;
  std::optional<EigenResult<double>> dirichlet;
  for (const auto &[name, bc] : families) {
    auto r = mu_spectrum(mesh, bc, k, tol_zero, {}, bc == BC::DirichletSides);
    rep.spectra[name] = r.eigenvalues;
    noise[name] = r.residuals.size() ? r.residuals.maxCoeff() : 1e-12 * r.norm_A;
    for (int j = 0; j < r.size(); ++j) {
      const std::string key = name == "even" ? "mu" + std::to_string(j + 1)
                              : name == "full" ? "mu" + std::to_string(j + 1) + "full"
                                               : "mu" + std::to_string(j + 1) + name;
      rep.named[key] = r.eigenvalues[j];
    }
    if (bc == BC::DirichletSides) dirichlet = std::move(r);
  }
  auto v = [&](const std::string &key) { return rep.named.at(key); };
  auto margin = [&](const std::string &a, const std::string &b) {
    return std::max(10.0 * std::max(noise[a], noise[b]), 1e-8);
  };
  auto eq = [&](const std::string &a, const std::string &b) {
    rep.relations.push_back(detail::rel_equal(a + " = " + b, v(a), v(b), detail::eq_tolerance(v(a), v(b))));
  };
  auto lt = [&](const std::string &name, double a, double b, double m) { rep.relations.push_back(detail::rel_less(name, a, b, m)); };

  lt("mu1D < 0", v("mu1D"), 0.0, margin("D", "D"));
  lt("mu1N < mu1D", v("mu1N"), v("mu1D"), margin("N", "D"));
  eq("mu1N", "mu1");
  eq("mu1N", "mu1NN");
  eq("mu1D", "mu1ND");
  eq("mu2NN", "mu2");
  eq("mu3N", "mu2");
  lt("mu3D > 0", 0.0, v("mu3D"), margin("D", "D"));
  lt("mu2N < 0", v("mu2N"), 0.0, margin("N", "N"));
  for (int j = 1; j <= std::min(k, 3); ++j) {
    const std::string s = std::to_string(j);
    lt("mu" + s + "DN < mu" + s + "DD", v("mu" + s + "DN"), v("mu" + s + "DD"), margin("DN", "DD"));
    lt("mu" + s + "NN < mu" + s + "DN", v("mu" + s + "NN"), v("mu" + s + "DN"), margin("NN", "DN"));
    lt("mu" + s + "ND < mu" + s + "DD", v("mu" + s + "ND"), v("mu" + s + "DD"), margin("ND", "DD"));
    lt("mu" + s + "NN < mu" + s + "ND", v("mu" + s + "NN"), v("mu" + s + "ND"), margin("NN", "ND"));
  }
  const double h2 = sqr(mesh.hx()) + sqr(mesh.hy());
  rep.mu2D_bound = bound_constant * (h2 + sqr(f.amplitude));
  if (genuine_wave) {
    rep.relations.push_back(detail::rel_equal("mu2D = 0", v("mu2D"), 0.0, rep.mu2D_bound));
    eq("mu2D", "mu1DD");
    const auto P = assemble<double>(mesh, BC::DirichletSides);
    const Eigen::VectorXd px = P.restrict(psi_x_lattice(f, mesh));
    const Eigen::VectorXd e2 = dirichlet->eigenvectors.col(1);
    rep.psi_x_correlation = m_correlation<double>(P.M_vol, e2, px);
    rep.relations.push_back({"corr(e_2D, psi_x) >= 0.999", rep.psi_x_correlation, 0.999, 0.0, ">=",
                             rep.psi_x_correlation >= 0.999 ? "holds" : "violated"});
  } else {
    rep.relations.push_back({"mu2D = 0", v("mu2D"), 0.0, 0.0, "==", "skipped"});
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct InterlacingCheck {
  int j = 0;
  double tau = 0.0, lower = 0.0, value = 0.0, upper = 0.0;
  bool weak = false;   // mu_jN <= mu_j(tau) <= mu_jD within tolerance
  bool strict = false; // both gaps exceed the margin
};

struct BlochSweep {
  double tau_star = 0.0;
  std::vector<double> taus;
  std::vector<Eigen::VectorXd> curves; // per tau, lowest j_max Bloch eigenvalues
  Eigen::VectorXd mu_N, mu_D, mu_full;
  std::vector<InterlacingCheck> checks;
  double margin = 1e-6;
  bool criterion_holds = false; // mu_1 < 0 < mu_2 on the even space
  bool zero_free = true;        // no Bloch eigenvalue within tol_zero of 0 for tau != 0
  double tol_zero = default_tol_zero;

  bool weak_interlacing() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.weak; });
  }
  bool strict_interlacing() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.strict; });
  }
  // strict failures confined to tau = tau*/2, where antiperiodic eigenfunctions of an x-even
  // problem split into side-Dirichlet and side-Neumann ones and equalities are exact
  bool strict_failures_only_at_half_period() const {
    for (const auto &c : checks)
      if (!c.strict && std::abs(c.tau - 0.5 * tau_star) > 1e-12 * tau_star) return false;
    return true;
  }
};

// tau_fractions are multiples of tau* = 2 pi / Lambda
inline BlochSweep bloch_sweep(const Mesh &mesh, const std::vector<double> &tau_fractions, int j_max = 4, double margin = 1e-6,
                              double tol_zero = default_tol_zero) {
  using BC = BoundaryCondition;
  BlochSweep s;
  s.tau_star = 2.0 * pi / mesh.length;
  s.margin = margin;
  s.tol_zero = tol_zero;
  s.mu_N = mu_spectrum(mesh, BC::NeumannSides, j_max, tol_zero, {}, false).eigenvalues;
  s.mu_D = mu_spectrum(mesh, BC::DirichletSides, j_max, tol_zero, {}, false).eigenvalues;
  s.mu_full = mu_spectrum(mesh, BC::PeriodicFull, j_max, tol_zero, {}, false).eigenvalues;
  const auto even = mu_spectrum(mesh, BC::PeriodicEven, 2, tol_zero, {}, false).eigenvalues;
  s.criterion_holds = even[0] < -tol_zero && even[1] > tol_zero;
  const double weak_tol = 1e-8 * std::max(1.0, s.mu_D.cwiseAbs().maxCoeff());
  for (double frac : tau_fractions) {
    const double tau = frac * s.tau_star;
    const auto r = bloch_spectrum(mesh, tau, j_max, tol_zero);
    s.taus.push_back(tau);
    s.curves.push_back(r.eigenvalues);
    const bool interior = frac > 0.0 && frac < 1.0;
    for (int j = 0; j < j_max; ++j) {
      InterlacingCheck c{j + 1, tau, s.mu_N[j], r.eigenvalues[j], s.mu_D[j]};
      c.weak = c.lower <= c.value + weak_tol && c.value <= c.upper + weak_tol;
      c.strict = c.value - c.lower > margin && c.upper - c.value > margin;
      if (!interior) c.strict = c.weak; // endpoints coincide with side problems
      s.checks.push_back(c);
      if (interior && std::abs(r.eigenvalues[j]) <= tol_zero) s.zero_free = false;
    }
  }
  return s;
}

inline void write_sweep_csv(std::ostream &os, const BlochSweep &s) {
  os.precision(12);
  os << "tau";
  const int j_max = s.curves.empty() ? 0 : static_cast<int>(s.curves.front().size());
  for (int j = 1; j <= j_max; ++j) os << ",mu" << j;
  os << '\n';
  for (std::size_t i = 0; i < s.taus.size(); ++i) {
    os << s.taus[i];
    for (int j = 0; j < j_max; ++j) os << ',' << s.curves[i][j];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------------------------

struct UniquenessVerdict {
  double mu1 = 0.0, mu2 = 0.0;
  bool criterion_holds = false;
  bool inconclusive = false;
  int m = 3;
  Eigen::VectorXd multi_spectrum;  // lowest eigenvalues of the m Lambda even problem
  Eigen::VectorXd bloch_union;     // same count from spectrum(even Lambda) and Bloch(k tau*/m)
  double min_abs_mu = 0.0;         // over the m Lambda even spectrum
  double decomposition_error = 0.0; // max relative mismatch of the two lists above
  bool subharmonic_excluded = false;
  double tol_zero = default_tol_zero;
};

// base: one-period mesh; multi: the same field on m periods (m odd)
inline UniquenessVerdict uniqueness_verdict(const Mesh &base, const Mesh &multi, int count = 12,
                                            double tol_zero = default_tol_zero) {
  using BC = BoundaryCondition;
  const int m = multi.periods;
  if (m < 3 || m % 2 == 0) throw InvalidInput("uniqueness verdict needs an odd period multiple >= 3");
  if (base.periods != 1) throw InvalidInput("base mesh must cover one period");
  UniquenessVerdict v;
  v.m = m;
  v.tol_zero = tol_zero;
  const auto even = mu_spectrum(base, BC::PeriodicEven, count, tol_zero, {}, false).eigenvalues;
  v.mu1 = even[0];
  v.mu2 = even[1];
  v.criterion_holds = v.mu1 < -tol_zero && v.mu2 > tol_zero;
  v.inconclusive = std::abs(v.mu2) <= tol_zero;
  const auto all = mu_spectrum(multi, BC::PeriodicEven, -1, tol_zero, {}, false).eigenvalues;
  v.min_abs_mu = all.cwiseAbs().minCoeff();
  v.multi_spectrum = all.head(std::min<int>(count, static_cast<int>(all.size())));
  // even m Lambda-periodic functions: the tau = 0 component is even, the components at
  // +-k tau*/m are tied by evenness, so each pair contributes one full Bloch spectrum
  std::vector<double> pool(even.data(), even.data() + even.size());
  const double tau_star = 2.0 * pi / base.length;
  for (int k = 1; k <= (m - 1) / 2; ++k) {
    const auto b = bloch_spectrum(base, k * tau_star / m, count, tol_zero).eigenvalues;
    pool.insert(pool.end(), b.data(), b.data() + b.size());
  }
  std::sort(pool.begin(), pool.end());
  v.bloch_union = Eigen::Map<Eigen::VectorXd>(pool.data(), static_cast<Eigen::Index>(pool.size())).head(v.multi_spectrum.size());
  for (int j = 0; j < v.multi_spectrum.size(); ++j)
    v.decomposition_error = std::max(v.decomposition_error, std::abs(v.multi_spectrum[j] - v.bloch_union[j]) /
                                                                std::max(1.0, std::abs(v.multi_spectrum[j])));
  v.subharmonic_excluded = v.criterion_holds && v.min_abs_mu > tol_zero;
  return v;
}

} // namespace stratwave
