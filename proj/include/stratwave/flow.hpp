#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "grid.hpp"
#include "ode.hpp"
#include "profiles.hpp"

namespace stratwave {

struct FlowParameters {
  double d = 1.0;      // channel depth
  double g = 1.0;      // gravitational constant
  double p0 = -1.0;    // relative pseudomass
  double Lambda = 2.0 * pi;
  double R = 0.0;      // Bernoulli constant, filled in by solve_laminar

  double tau_star() const { return 2.0 * pi / Lambda; }

  void validate() const {
    if (!(d > 0.0)) throw InvalidInput("depth d must be positive");
    if (!(g > 0.0)) throw InvalidInput("gravity g must be positive");
    if (!(p0 < 0.0)) throw InvalidInput("relative pseudomass p0 must be negative");
    if (!(Lambda > 0.0)) throw InvalidInput("period Lambda must be positive");
  }
};

// Uniformly tabulated function with derivative, evaluated by cubic Hermite interpolation.
class HermiteTable {
public:
  HermiteTable() = default;
  HermiteTable(double lo, double h, std::vector<double> f, std::vector<double> df)
      : lo_(lo), h_(h), f_(std::move(f)), df_(std::move(df)) {}

  double lo() const { return lo_; }
  double hi() const { return lo_ + h_ * static_cast<double>(f_.size() - 1); }

  double operator()(double y) const { return eval(y, false); }
  double derivative(double y) const { return eval(y, true); }

private:
  double eval(double y, bool deriv) const {
    const double u = std::clamp((y - lo_) / h_, 0.0, static_cast<double>(f_.size() - 1));
    const auto k = std::min(static_cast<std::size_t>(u), f_.size() - 2);
    const double s = u - static_cast<double>(k);
    const double f0 = f_[k], f1 = f_[k + 1], d0 = df_[k] * h_, d1 = df_[k + 1] * h_;
    if (!deriv) {
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
      return h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
    }
    const double g00 = 6 * s * s - 6 * s, g10 = 3 * s * s - 4 * s + 1;
    const double g01 = -6 * s * s + 6 * s, g11 = 3 * s * s - 2 * s;
    return (g00 * f0 + g10 * d0 + g01 * f1 + g11 * d1) / h_;
  }

  double lo_ = 0.0, h_ = 1.0;
  std::vector<double> f_, df_;
};

// x-independent background flow psi(y) on [-d, 0] (tabulated a little above the surface so
// that perturbed surfaces y = xi(x) > 0 can be sampled).
struct LaminarProfile {
  FlowParameters params; // R filled in
  double slope_bottom = 0.0;
  HermiteTable psi, psi_y;
  bool monotone = false; // psi_y < 0 throughout [-d, 0]
  double residual = 0.0; // |psi(0)| after shooting
};

// Transverse mode gamma(y, tau) of the linearized laminar problem, gamma(-d) = 0.
struct TransverseMode {
  double tau = 0.0;
  HermiteTable gamma; // normalized gamma(0) = 1
  double dispersion = 0.0; // psi_y(0) gamma'(0) - sigma gamma(0) for the normalized mode
};

struct Bifurcation {
  double tau = 0.0;
  TransverseMode mode;
};

namespace detail {

inline constexpr double table_top_fraction = 0.5; // table extends to y = 0.5 d
inline constexpr int table_cells = 3000;

inline std::vector<double> table_nodes(double d) {
  const double lo = -d, hi = table_top_fraction * d;
  std::vector<double> ys(table_cells + 1);
  for (int k = 0; k <= table_cells; ++k) ys[k] = lo + (hi - lo) * k / table_cells;
  return ys;
}

} // namespace detail

// Shooting from the bottom on psi'' = g y rho'(-psi) + beta(psi), psi(-d) = -p0, psi(0) = 0.
inline LaminarProfile solve_laminar(const FluidProfiles &prof, FlowParameters params, double tol = 1e-12) {
  params.validate();
  const double d = params.d, g = params.g, p0 = params.p0;
  auto rhs = [&](double y, const ode::State<2> &s) {
    return ode::State<2>{s[1], -prof.omega(g, y, s[0])};
  };
  auto shoot = [&](double slope) { return ode::integrate<2>(rhs, -d, {-p0, slope}, 0.0, tol)[0]; };

  const double s0 = p0 / d;
  double a = s0, b = s0, fa = shoot(a), fb = fa;
  double width = std::max(1.0, std::abs(s0)) * 0.05;
  for (int it = 0; it < 60 && (fa > 0.0) == (fb > 0.0) && fa != 0.0; ++it) {
    a = s0 - width;
    b = s0 + width;
    fa = shoot(a);
    fb = shoot(b);
    width *= 2.0;
  }
  if ((fa > 0.0) == (fb > 0.0) && fa != 0.0)
    throw SolveFailure("laminar shooting: could not bracket the bottom slope", std::min(std::abs(fa), std::abs(fb)));
  double slope = fa == 0.0 ? a : ode::bisect(shoot, a, b, 1e-15);
  // secant polish
  for (int it = 0; it < 3; ++it) {
    const double f0 = shoot(slope), eps = 1e-7 * std::max(1.0, std::abs(slope));
    const double f1 = shoot(slope + eps);
    if (f1 == f0) break;
    const double next = slope - f0 * eps / (f1 - f0);
    if (std::abs(shoot(next)) < std::abs(f0)) slope = next;
  }

  const auto ys = detail::table_nodes(d);
  const auto states = ode::integrate_to<2>(rhs, -d, {-p0, slope}, ys, tol);
  std::vector<double> f(ys.size()), df(ys.size()), ddf(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    f[k] = states[k][0];
    df[k] = states[k][1];
    ddf[k] = -prof.omega(g, ys[k], f[k]);
  }
  LaminarProfile lp;
  const double h = ys[1] - ys[0];
  lp.psi = HermiteTable(-d, h, f, df);
  lp.psi_y = HermiteTable(-d, h, df, ddf);
  lp.slope_bottom = slope;
  lp.residual = std::abs(lp.psi(0.0));
  if (!(lp.residual <= 1e-8)) throw SolveFailure("laminar shooting did not converge", lp.residual);
  lp.monotone = true;
  for (std::size_t k = 0; k < ys.size() && ys[k] <= 1e-14; ++k)
    if (!(df[k] < 0.0)) lp.monotone = false;
  const double uy0 = lp.psi_y(0.0);
  params.R = 0.5 * uy0 * uy0 + g * prof.rho(0.0) * d;
  lp.params = params;
  return lp;
}

// omega*(y) along the laminar flow, and the surface coefficient
// sigma = (psi_y psi_yy + g rho(0)) / psi_y at y = 0.
inline double laminar_omega_star(const LaminarProfile &lp, const FluidProfiles &prof, double y) {
  return prof.omega_psi(lp.params.g, y, lp.psi(y));
}

inline double laminar_sigma(const LaminarProfile &lp, const FluidProfiles &prof) {
  const double uy = lp.psi_y(0.0);
  const double uyy = -prof.omega(lp.params.g, 0.0, 0.0);
  return (uy * uyy + lp.params.g * prof.rho(0.0)) / uy;
}

namespace detail {

// gamma'' = (tau^2 - omega*(y)) gamma integrated jointly with the laminar profile
inline std::vector<ode::State<4>> mode_states(const LaminarProfile &lp, const FluidProfiles &prof, double tau,
                                               const std::vector<double> &ys) {
  const double g = lp.params.g, d = lp.params.d;
  auto rhs = [&](double y, const ode::State<4> &s) {
    const double ws = prof.omega_psi(g, y, s[0]);
    return ode::State<4>{s[1], -prof.omega(g, y, s[0]), s[3], (tau * tau - ws) * s[2]};
  };
  return ode::integrate_to<4>(rhs, -d, {-lp.params.p0, lp.slope_bottom, 0.0, 1.0}, ys, 1e-12);
}

} // namespace detail

// psi_y(0) gamma'(0) - sigma gamma(0) for gamma(-d) = 0, gamma'(-d) = 1, scaled by
// exp(-tau d) to keep the magnitude tame for large tau.
inline double dispersion_function(const LaminarProfile &lp, const FluidProfiles &prof, double tau) {
  const auto s = detail::mode_states(lp, prof, tau, {0.0}).front();
  const double uy = s[1];
  const double sigma = laminar_sigma(lp, prof);
  return (uy * s[3] - sigma * s[2]) * std::exp(-tau * lp.params.d);
}

inline TransverseMode transverse_mode(const LaminarProfile &lp, const FluidProfiles &prof, double tau) {
  const auto ys = detail::table_nodes(lp.params.d);
  const auto st = detail::mode_states(lp, prof, tau, ys);
  // value at y = 0 for normalization
  const auto s0 = detail::mode_states(lp, prof, tau, {0.0}).front();
  if (!(std::abs(s0[2]) > 1e-300)) throw SolveFailure("transverse mode vanishes at the surface", 0.0);
  const double scale = 1.0 / s0[2];
  std::vector<double> f(ys.size()), df(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    f[k] = st[k][2] * scale;
    df[k] = st[k][3] * scale;
  }
  TransverseMode m;
  m.tau = tau;
  m.gamma = HermiteTable(ys.front(), ys[1] - ys[0], f, df);
  m.dispersion = s0[1] * s0[3] * scale - laminar_sigma(lp, prof);
  return m;
}

// Smallest tau > 0 at which the laminar flow admits a nontrivial mode cos(tau x) gamma(y).
inline std::optional<Bifurcation> bifurcation_tau(const LaminarProfile &lp, const FluidProfiles &prof,
                                                  double tau_max_over_d = 40.0, double xtol = 1e-13) {
  const double d = lp.params.d;
  const double step = 0.005 / d, tau_max = tau_max_over_d / d;
  auto D = [&](double tau) { return dispersion_function(lp, prof, tau); };
  double a = step, fa = D(a);
  for (double b = a + step; b <= tau_max; b += step) {
    const double fb = D(b);
    if (fa == 0.0 || (fa > 0.0) != (fb > 0.0)) {
      const double root = fa == 0.0 ? a : ode::bisect(D, a, b, xtol);
      return Bifurcation{root, transverse_mode(lp, prof, root)};
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

// Background solution on the flattened strip: psi(x_i, yhat_j) and xi(x_i).
struct WaveField {
  FlowParameters params;
  Grid grid;
  GridFunction psi;  // nx x (ny + 1)
  Eigen::ArrayXd xi; // nx
  double amplitude = 0.0;
  double tau = 0.0; // wavenumber of the first-order correction (0 for laminar)

  FlatteningMetric metric() const { return make_metric(xi, grid.length, params.d); }
  double y(int i, int j) const { return grid.yhat(j) * (xi[i] + params.d) / params.d - params.d; }
};

inline void check_field(const WaveField &f) {
  if ((f.xi + f.params.d).minCoeff() <= 0.0) throw InvalidInput("surface touches the bottom (xi + d <= 0)");
}

// Field sampled from a physical stream function psi(x, y) on the domain below y = xi(x).
inline WaveField field_from_physical(const FlowParameters &params, const Grid &grid, const Eigen::ArrayXd &xi,
                                     const std::function<double(double, double)> &psi) {
  WaveField f;
  f.params = params;
  f.grid = grid;
  f.xi = xi;
  check_field(f);
  f.psi = grid.zeros();
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j <= grid.ny; ++j) f.psi(i, j) = psi(grid.x(i), f.y(i, j));
  return f;
}

inline WaveField laminar_field(const LaminarProfile &lp, int nx, int ny) {
  const Grid grid(nx, ny, lp.params.Lambda, lp.params.d);
  WaveField f = field_from_physical(lp.params, grid, Eigen::ArrayXd::Zero(nx), [&](double, double y) { return lp.psi(y); });
  f.psi.col(0).setConstant(-lp.params.p0);
  f.psi.col(ny).setZero();
  return f;
}

// First-order branch field psi = psi_lam(y) + t cos(tau x) gamma(y, tau). The surface is the
// exact zero level of this psi, which agrees with -t cos(tau x) gamma(0) / psi_y(0) to O(t^2).
// The period becomes 2 pi / tau.
inline WaveField stokes_field(const LaminarProfile &lp, const TransverseMode &mode, double t, int nx, int ny) {
  FlowParameters params = lp.params;
  params.Lambda = 2.0 * pi / mode.tau;
  const Grid grid(nx, ny, params.Lambda, params.d);
  const double tau = mode.tau;
  auto Psi = [&](double x, double y) { return lp.psi(y) + t * std::cos(tau * x) * mode.gamma(y); };
  auto Psi_y = [&](double x, double y) { return lp.psi_y(y) + t * std::cos(tau * x) * mode.gamma.derivative(y); };
  Eigen::ArrayXd xi(nx);
  const double uy0 = lp.psi_y(0.0);
  const double top = detail::table_top_fraction * params.d;
  for (int i = 0; i < nx; ++i) {
    const double x = grid.x(i);
    double s = -t * std::cos(tau * x) * mode.gamma(0.0) / uy0;
    for (int it = 0; it < 50; ++it) {
      const double fy = Psi_y(x, s);
      if (!(fy < 0.0)) throw InvalidInput("stokes_field: psi_y >= 0 at the surface");
      const double ds = Psi(x, s) / fy;
      s -= ds;
      if (std::abs(ds) < 1e-15 * (1.0 + std::abs(s))) break;
    }
    if (!(s < top) || !(s > -params.d)) throw InvalidInput("stokes_field: amplitude too large");
    xi[i] = s;
  }
  // enforce exact evenness of the surface samples
  for (int i = 1; i < nx / 2; ++i) {
    const double avg = 0.5 * (xi[i] + xi[nx - i]);
    xi[i] = xi[nx - i] = avg;
  }
  WaveField f = field_from_physical(params, grid, xi, Psi);
  for (int i = 1; i < nx / 2; ++i) f.psi.row(nx - i) = f.psi.row(i);
  f.psi.col(0).setConstant(-params.p0);
  f.psi.col(ny).setZero();
  f.amplitude = t;
  f.tau = tau;
  const auto d = physical_derivatives<double>(f.psi, grid, f.metric());
  if (d.y.col(ny).maxCoeff() >= 0.0) throw InvalidInput("stokes_field: psi_y >= 0 on the surface row");
  return f;
}

struct PdeResidual {
  double interior = 0.0;  // sup |Laplace psi + omega(y, psi)| over interior nodes
  double bernoulli = 0.0; // sup |0.5 |grad psi|^2 + g rho(0)(xi + d) - R| on the surface
  double kinematic = 0.0; // sup of boundary value mismatches psi(top) and psi(bottom) + p0
};

inline PdeResidual pde_residual(const WaveField &f, const FluidProfiles &prof) {
  const auto m = f.metric();
  const auto D = physical_derivatives<double>(f.psi, f.grid, m);
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double g = f.params.g;
  // fourth-order surface gradient for the Bernoulli condition
  const GridFunction fy4 = stencil::dy4<double>(f.psi, f.grid.hy());
  const GridFunction fx = stencil::dx<double>(f.psi, f.grid.hx());
  PdeResidual r;
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) {
      const double res = D.xx(i, j) + D.yy(i, j) + prof.omega(g, f.y(i, j), f.psi(i, j));
      r.interior = std::max(r.interior, std::abs(res));
    }
    const double uy = fy4(i, ny) / m.H(i), ux = fx(i, ny) - m.a(i, f.grid.depth) * fy4(i, ny);
    const double b = 0.5 * (ux * ux + uy * uy) + g * prof.rho(0.0) * (f.xi[i] + f.params.d) - f.params.R;
    r.bernoulli = std::max(r.bernoulli, std::abs(b));
    r.kinematic = std::max({r.kinematic, std::abs(f.psi(i, ny)), std::abs(f.psi(i, 0) + f.params.p0)});
  }
  return r;
}

} // namespace stratwave
