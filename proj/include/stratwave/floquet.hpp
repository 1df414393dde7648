#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "eigensolve.hpp"
#include "flow.hpp"
#include "linearize.hpp"
#include "spectra.hpp"

namespace stratwave {

struct JordanChain {
  double amplitude = 0.0, tau_star = 0.0;
  GridFunction u0, u1; // field grid, nx x (ny + 1)
  double mu1 = 0.0, mu2 = 0.0; // even-space eigenvalues
  bool criterion_holds = false;
  double algebraic_residual = 0.0; // |A x - b| / |b|
  double interior_residual = 0.0;  // sup |(Laplace + omega*) u1 + 2 u0_x| / sup |u1| on rows 1 .. ny - 1
  double surface_residual = 0.0;   // sup |grad psi . grad u1 - sigma u1 + psi_x u0| / sup |u1|
  double lhs_gauss = 0.0, lhs_nodal = 0.0;
  std::optional<double> mode_correlation; // u1 against cos(tau* x) gamma(y)
  std::optional<double> c;                // branch curvature, fitted from u1 or supplied
  std::optional<double> lhs_leading;      // -(tau*^2 / c) int sin^2(tau* x) gamma^2
  double tol = 1e-8;
  int chain_length = 0; // 2, or 0 for undetermined
  std::string verdict = "undetermined";
};

namespace detail {

// physical d/dx of a field-grid function: spectral in x, fourth order in yhat
inline GridFunction dx_physical(const GridFunction &u, const WaveField &f) {
  const auto m = f.metric();
  const GridFunction ux = dx_spectral(u, f.grid.length, 1);
  const GridFunction uy = stencil::dy4<double>(u, f.grid.hy());
  GridFunction r(u.rows(), u.cols());
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j) r(i, j) = ux(i, j) - m.a(i, f.grid.yhat(j)) * uy(i, j);
  return r;
}

inline GridFunction to_lattice(const GridFunction &u, const Mesh &mesh) {
  GridFunction L(mesh.columns() + 1, mesh.ny + 1);
  for (int c = 0; c <= mesh.columns(); ++c) L.row(c) = u.row(mesh.field_index(c));
  return L;
}

inline GridFunction from_lattice(const GridFunction &L, const Mesh &mesh) {
  GridFunction u(mesh.nx, mesh.ny + 1);
  for (int c = 0; c < mesh.columns(); ++c) u.row(mesh.field_index(c)) = L.row(c);
  return u;
}

// int (u0 + 2 u1_x) u0 - int_S psi_x u1 u0 dx / psi_y with Gauss quadrature on the Q2 interpolants
inline double transversality_gauss(const Mesh &mesh, const GridFunction &u0L, const GridFunction &u1L) {
  using Q = Quadratic;
  const double hx2 = 2.0 * mesh.hx(), hy2 = 2.0 * mesh.hy(), d = mesh.depth;
  double vol = 0.0, surf = 0.0;
  for (int ex = 0; ex < mesh.columns() / 2; ++ex) {
    const int c = 2 * ex;
    for (int gx = 0; gx < 3; ++gx) {
      const double s = gauss_s[gx], x = mesh.x(c) + s * hx2;
      const double xi = mesh.xi(x), xi1 = mesh.xi(x, 1), H = (xi + d) / d;
      for (int ey = 0; ey < mesh.ny / 2; ++ey) {
        const int r = 2 * ey;
        for (int gy = 0; gy < 3; ++gy) {
          const double t = gauss_s[gy], yh = mesh.yhat(r) + t * hy2, a = yh * xi1 / (xi + d);
          double u0 = 0.0, u1x = 0.0;
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
              u0 += u0L(c + p, r + q) * Q::phi(p, s) * Q::phi(q, t);
              const double dxh = Q::dphi(p, s) * Q::phi(q, t) / hx2, dyh = Q::phi(p, s) * Q::dphi(q, t) / hy2;
              u1x += u1L(c + p, r + q) * (dxh - a * dyh);
            }
          vol += gauss_w[gx] * gauss_w[gy] * hx2 * hy2 * H * (u0 + 2.0 * u1x) * u0;
        }
      }
      double u0s = 0.0, u1s = 0.0, py = 0.0;
      for (int p = 0; p < 3; ++p) {
        u0s += u0L(c + p, mesh.ny) * Q::phi(p, s);
        u1s += u1L(c + p, mesh.ny) * Q::phi(p, s);
        py += mesh.psi_y_S[c + p] * Q::phi(p, s);
      }
      surf += gauss_w[gx] * hx2 * u0s * u1s * u0s / py; // psi_x = u0 on the surface
    }
  }
  return vol - surf;
}

// same integral with finite differences and the trapezoidal rule on the grid nodes
inline double transversality_nodal(const WaveField &f, const GridFunction &u0, const GridFunction &u1, const Eigen::ArrayXd &psi_y_S) {
  const auto m = f.metric();
  const auto D1 = physical_derivatives<double>(u1, f.grid, m);
  const int nx = f.grid.nx, ny = f.grid.ny;
  double vol = 0.0, surf = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double w = (j == 0 || j == ny) ? 0.5 : 1.0;
      vol += w * m.H(i) * (u0(i, j) + 2.0 * D1.x(i, j)) * u0(i, j);
    }
    surf += u0(i, ny) * u1(i, ny) * u0(i, ny) / psi_y_S[i];
  }
  return (vol * f.grid.hy() - surf) * f.grid.hx();
}

} // namespace detail

// u1 in the even periodic space from a(u1, v) = int 2 u0_x v - int_S psi_x u0 v dx / psi_y.
inline JordanChain solve_u1(const WaveField &f, const FluidProfiles &prof, double tol_zero = default_tol_zero) {
  const auto coeffs = coefficients(f, prof);
  const Mesh mesh = build_mesh(f, coeffs, 1);
  JordanChain jc;
  jc.amplitude = f.amplitude;
  jc.tau_star = 2.0 * pi / f.grid.length;
  const auto P = assemble<double>(mesh, BoundaryCondition::PeriodicEven);
  const auto spec = solve_gen<double>(P.A, P.M_vol, -1, tol_zero, false);
  jc.mu1 = spec.eigenvalues[0];
  jc.mu2 = spec.eigenvalues[1];
  jc.criterion_holds = jc.mu1 < -tol_zero && jc.mu2 > tol_zero;
  const double min_abs = spec.eigenvalues.cwiseAbs().minCoeff();
  if (min_abs <= tol_zero)
    throw SolveFailure("even-space operator is singular: min |mu| = " + std::to_string(min_abs) +
                           ", condition ~ " + std::to_string(spec.eigenvalues.cwiseAbs().maxCoeff() / min_abs),
                       min_abs);

  // u0 = psi_x with spectral x-differencing
  const auto m = f.metric();
  {
    const GridFunction px = dx_spectral(f.psi, f.grid.length, 1);
    const GridFunction py = stencil::dy4<double>(f.psi, f.grid.hy());
    jc.u0.resize(f.grid.nx, f.grid.ny + 1);
    for (int i = 0; i < f.grid.nx; ++i)
      for (int j = 0; j <= f.grid.ny; ++j) jc.u0(i, j) = px(i, j) - m.a(i, f.grid.yhat(j)) * py(i, j);
    jc.u0.col(0).setZero();
  }
  const GridFunction u0x = detail::dx_physical(jc.u0, f);
  GridFunction surf = GridFunction::Zero(f.grid.nx, f.grid.ny + 1);
  surf.col(f.grid.ny) = jc.u0.col(f.grid.ny) * jc.u0.col(f.grid.ny);
  const Eigen::VectorXd b = P.M_vol * P.restrict(detail::to_lattice(GridFunction(2.0 * u0x), mesh)) +
                            P.M_surf * P.restrict(detail::to_lattice(surf, mesh));
  const Eigen::VectorXd x = P.A.partialPivLu().solve(b);
  jc.algebraic_residual = b.norm() > 0.0 ? (P.A * x - b).norm() / b.norm() : (P.A * x).norm();
  const GridFunction u1L = P.expand(x);
  jc.u1 = detail::from_lattice(u1L, mesh);

  // strong-form residuals with finite differences
  const auto D = physical_derivatives<double>(jc.u1, f.grid, m);
  const double scale = std::max(jc.u1.abs().maxCoeff(), 1e-300);
  const int ny = f.grid.ny;
  for (int i = 0; i < f.grid.nx; ++i) {
    for (int j = 1; j < ny; ++j)
      jc.interior_residual =
          std::max(jc.interior_residual, std::abs(D.xx(i, j) + D.yy(i, j) + coeffs.omega_star(i, j) * jc.u1(i, j) + 2.0 * u0x(i, j)));
    const double bres = coeffs.psi_x_S[i] * D.x(i, ny) + coeffs.psi_y_S[i] * D.y(i, ny) - coeffs.sigma[i] * jc.u1(i, ny) +
                        coeffs.psi_x_S[i] * jc.u0(i, ny);
    jc.surface_residual = std::max(jc.surface_residual, std::abs(bres));
  }
  if (jc.u1.abs().maxCoeff() > 0.0) {
    jc.interior_residual /= scale;
    jc.surface_residual /= scale;
  }
  jc.lhs_gauss = detail::transversality_gauss(mesh, detail::to_lattice(jc.u0, mesh), u1L);
  jc.lhs_nodal = detail::transversality_nodal(f, jc.u0, jc.u1, coeffs.psi_y_S);
  return jc;
}

// Adds the comparison with u1 ~ -(1 / 2 c t) cos(tau* x) gamma(y) and the leading-order value
// of the solvability integral. c is fitted from u1 unless supplied.
inline void compare_with_expansion(JordanChain &jc, const WaveField &f, const TransverseMode &mode, std::optional<double> c = {}) {
  const auto m = f.metric();
  const int nx = f.grid.nx, ny = f.grid.ny;
  double uu = 0.0, pp = 0.0, up = 0.0, ss = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = f.grid.x(i);
    for (int j = 0; j <= ny; ++j) {
      const double w = ((j == 0 || j == ny) ? 0.5 : 1.0) * m.H(i);
      const double g = mode.gamma(f.y(i, j));
      const double phi = std::cos(jc.tau_star * x) * g;
      uu += w * jc.u1(i, j) * jc.u1(i, j);
      pp += w * phi * phi;
      up += w * jc.u1(i, j) * phi;
      ss += w * sqr(std::sin(jc.tau_star * x) * g);
    }
  }
  const double cell = f.grid.hx() * f.grid.hy();
  if (uu > 0.0 && pp > 0.0) jc.mode_correlation = std::abs(up) / std::sqrt(uu * pp);
  const double alpha = pp > 0.0 ? up / pp : 0.0;
  if (c) jc.c = c;
  else if (alpha != 0.0 && f.amplitude != 0.0) jc.c = -1.0 / (2.0 * f.amplitude * alpha);
  if (jc.c) jc.lhs_leading = -(sqr(jc.tau_star) / *jc.c) * ss * cell;
}

inline JordanChain chain_report(const WaveField &f, const FluidProfiles &prof, const std::optional<TransverseMode> &mode = {},
                                std::optional<double> c = {}, double tol = 1e-8, double tol_zero = default_tol_zero) {
  auto jc = solve_u1(f, prof, tol_zero);
  jc.tol = tol;
  if (mode) compare_with_expansion(jc, f, *mode, c);
  if (std::abs(jc.lhs_gauss) > tol) {
    jc.chain_length = 2;
    jc.verdict = "chain_length=2";
  }
  return jc;
}

} // namespace stratwave
