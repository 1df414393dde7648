#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "flow.hpp"
#include "grid.hpp"
#include "profiles.hpp"

namespace stratwave {

struct LinearizedCoefficients {
  GridFunction omega_star; // on all flattened grid nodes
  Eigen::ArrayXd sigma;    // surface nodes
  Eigen::ArrayXd psi_x_S, psi_y_S;
};

inline LinearizedCoefficients coefficients(const WaveField &f, const FluidProfiles &prof, double min_psi_y = 1e-8) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double g = f.params.g;
  const auto D = physical_derivatives<double>(f.psi, f.grid, f.metric());
  LinearizedCoefficients c;
  c.omega_star = f.grid.zeros();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j <= ny; ++j) c.omega_star(i, j) = prof.omega_psi(g, f.y(i, j), f.psi(i, j));
  c.sigma.resize(nx);
  c.psi_x_S = D.x.col(ny);
  c.psi_y_S = D.y.col(ny);
  for (int i = 0; i < nx; ++i) {
    const double uy = D.y(i, ny);
    if (!(uy < -min_psi_y)) throw InvalidInput("singular sigma: psi_y is not negative on the surface");
    c.sigma[i] = (D.x(i, ny) * D.xy(i, ny) + uy * D.yy(i, ny) + g * prof.rho(0.0)) / uy;
  }
  return c;
}

struct LinearizedAction {
  GridFunction Au;
  Eigen::ArrayXd Bu;
};

// A u = Laplace u + omega* u on the grid, B u = grad psi . grad u - sigma u on the surface row.
inline LinearizedAction apply_AB(const LinearizedCoefficients &c, const WaveField &f, const GridFunction &u) {
  const auto m = f.metric();
  const auto Du = physical_derivatives<double>(u, f.grid, m);
  const int ny = f.grid.ny;
  LinearizedAction r;
  r.Au = Du.laplacian() + c.omega_star * u;
  r.Bu = c.psi_x_S * Du.x.col(ny) + c.psi_y_S * Du.y.col(ny) - c.sigma * u.col(ny);
  return r;
}

// ---------------------------------------------------------------------------------------------
// Partial hodograph coordinates q = x, p = -psi, h(q, p) = d + y.

struct HodographField {
  double p0 = -1.0, d = 1.0, length = 2.0 * pi, g = 1.0;
  int nq = 0, np = 0;
  GridFunction h, h_q, h_p; // nq x (np + 1), p_k = p0 + k (0 - p0) / np
  double delta = 0.0;       // min h_p

  double hq_step() const { return length / nq; }
  double hp_step() const { return -p0 / np; }
  double p(int k) const { return p0 + k * hp_step(); }
  double q(int i) const { return (i - nq / 2) * hq_step(); }
};

namespace detail {

inline double hermite(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
  const double h = x1 - x0, s = (x - x0) / h;
  return (1 + 2 * s) * (1 - s) * (1 - s) * f0 + s * (1 - s) * (1 - s) * h * d0 + s * s * (3 - 2 * s) * f1 +
         s * s * (s - 1) * h * d1;
}

// Fritsch-Carlson limiting of node slopes for monotone data
inline void limit_slopes(const std::vector<double> &x, const std::vector<double> &f, std::vector<double> &df) {
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double delta = (f[k + 1] - f[k]) / (x[k + 1] - x[k]);
    if (delta == 0.0) {
      df[k] = df[k + 1] = 0.0;
      continue;
    }
    const double a = df[k] / delta, b = df[k + 1] / delta;
    if (a < 0.0) df[k] = 0.0;
    if (b < 0.0) df[k + 1] = 0.0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      df[k] = t * a * delta;
      df[k + 1] = t * b * delta;
    }
  }
}

// cubic Lagrange interpolation of column data (x_j, f_j) at x, using the 4 nearest nodes
inline double lagrange_column(const std::vector<double> &x, const std::vector<double> &f, double at) {
  const int n = static_cast<int>(x.size());
  int k = static_cast<int>(std::upper_bound(x.begin(), x.end(), at) - x.begin()) - 2;
  k = std::clamp(k, 0, n - 4);
  double r = 0.0;
  for (int a = k; a < k + 4; ++a) {
    double w = 1.0;
    for (int b = k; b < k + 4; ++b)
      if (b != a) w *= (at - x[b]) / (x[a] - x[b]);
    r += w * f[a];
  }
  return r;
}

} // namespace detail

inline HodographField hodograph_build(const WaveField &f, int np = -1) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  if (np < 0) np = ny;
  if (np < 4) throw InvalidInput("hodograph needs at least 4 p-cells");
  const auto m = f.metric();
  const GridFunction fy4 = stencil::dy4<double>(f.psi, f.grid.hy());
  HodographField hf;
  hf.p0 = f.params.p0;
  hf.d = f.params.d;
  hf.length = f.grid.length;
  hf.g = f.params.g;
  hf.nq = nx;
  hf.np = np;
  hf.h.resize(nx, np + 1);
  std::vector<double> pc(ny + 1), yc(ny + 1), dyp(ny + 1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double psi_y = fy4(i, j) / m.H(i);
      if (!(psi_y < 0.0)) throw InvalidInput("hodograph unavailable: psi_y >= 0 inside the flow");
      pc[j] = -f.psi(i, j);
      yc[j] = f.y(i, j);
      dyp[j] = -1.0 / psi_y;
    }
    for (int j = 0; j < ny; ++j)
      if (!(pc[j + 1] > pc[j])) throw InvalidInput("hodograph unavailable: non-monotone column");
    detail::limit_slopes(pc, yc, dyp);
    for (int k = 0; k <= np; ++k) {
      const double p = hf.p(k);
      if (k == 0) {
        hf.h(i, k) = 0.0;
        continue;
      }
      int j = static_cast<int>(std::upper_bound(pc.begin(), pc.end(), p) - pc.begin()) - 1;
      j = std::clamp(j, 0, ny - 1);
      hf.h(i, k) = detail::hermite(pc[j], pc[j + 1], yc[j], yc[j + 1], dyp[j], dyp[j + 1], p) + f.params.d;
    }
    hf.h(i, np) = f.xi[i] + f.params.d;
  }
  hf.h_q = stencil::dx4<double>(hf.h, hf.hq_step());
  hf.h_p = stencil::dy4<double>(hf.h, hf.hp_step());
  hf.delta = hf.h_p.minCoeff();
  return hf;
}

struct HodographAction {
  GridFunction Fw;      // nq x (np + 1); boundary rows carry one-sided values
  Eigen::ArrayXd Gw;    // p = 0
};

// Divergence form: F w = (P)_p - (Qf)_q + g w rho_p with fluxes
// P = h_q w_q / h_p^2 - (1 + h_q^2) w_p / h_p^3 and Qf = w_q / h_p - h_q w_p / h_p^2.
inline HodographAction apply_hodograph_frechet(const HodographField &hf, const FluidProfiles &prof, const GridFunction &w) {
  const double dq = hf.hq_step(), dp = hf.hp_step();
  const GridFunction wq = stencil::dx<double>(w, dq);
  const GridFunction wp = stencil::dy<double>(w, dp);
  const GridFunction hp2 = hf.h_p * hf.h_p;
  const GridFunction P = hf.h_q * wq / hp2 - (1.0 + hf.h_q * hf.h_q) * wp / (hp2 * hf.h_p);
  const GridFunction Qf = wq / hf.h_p - hf.h_q * wp / hp2;
  HodographAction r;
  r.Fw = stencil::dy<double>(P, dp) - stencil::dx<double>(Qf, dq);
  for (int k = 0; k <= hf.np; ++k) r.Fw.col(k) += hf.g * prof.rho1(hf.p(k)) * w.col(k);
  r.Gw = P.col(hf.np) + hf.g * prof.rho(0.0) * w.col(hf.np);
  return r;
}

struct HodographCheck {
  double interior = 0.0; // sup |F w + f(q, h)| on p rows 2 .. np - 2
  double surface = 0.0;  // sup |G w - g|
};

// Transports u to the hodograph grid as w = u(q, h) h_p and checks it against (f, g) = (A u, B u).
inline HodographCheck verify_hodograph_equivalence(const WaveField &f, const FluidProfiles &prof, const GridFunction &u,
                                const GridFunction &fA, const Eigen::ArrayXd &gB, int np = -1) {
  const auto hf = hodograph_build(f, np);
  const int nx = f.grid.nx, ny = f.grid.ny;
  GridFunction w(nx, hf.np + 1), fq(nx, hf.np + 1);
  std::vector<double> yc(ny + 1), uc(ny + 1), fc(ny + 1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      yc[j] = f.y(i, j);
      uc[j] = u(i, j);
      fc[j] = fA(i, j);
    }
    for (int k = 0; k <= hf.np; ++k) {
      const double y = hf.h(i, k) - f.params.d;
      w(i, k) = detail::lagrange_column(yc, uc, y) * hf.h_p(i, k);
      fq(i, k) = detail::lagrange_column(yc, fc, y);
    }
  }
  const auto act = apply_hodograph_frechet(hf, prof, w);
  HodographCheck r;
  for (int i = 0; i < nx; ++i) {
    for (int k = 2; k <= hf.np - 2; ++k) r.interior = std::max(r.interior, std::abs(act.Fw(i, k) + fq(i, k)));
    r.surface = std::max(r.surface, std::abs(act.Gw[i] - gB[i]));
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Linearization in flattened coordinates with respect to (psi_hat, xi).

struct FlatteningReport {
  GridFunction F;          // derivative of the interior equation
  Eigen::ArrayXd G;        // derivative of the Bernoulli condition
  double interior = 0.0;   // sup |(Laplace + omega*) v - F| on rows 2 .. ny - 2
  double surface = 0.0;    // sup |psi_x v_x + psi_y v_y + sigma_hat zeta - G|
};

inline FlatteningReport flattening_frechet(const WaveField &f, const FluidProfiles &prof, const GridFunction &u,
                                           const Eigen::ArrayXd &zeta) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double d = f.params.d, g = f.params.g, hx = f.grid.hx(), hy = f.grid.hy();
  const auto m = f.metric();
  const GridFunction &psi = f.psi;
  const GridFunction py = stencil::dy<double>(psi, hy);
  const GridFunction pyy = stencil::dyy<double>(psi, hy);
  const GridFunction pxy = stencil::dx<double>(py, hx);
  const GridFunction px = stencil::dx<double>(psi, hx);
  const auto Du = physical_derivatives<double>(u, f.grid, m);
  const auto Dp = physical_derivatives<double>(psi, f.grid, m);

  const Eigen::ArrayXd Z = zeta / (f.xi + d);
  const PeriodicInterpolant Zi(Z, f.grid.length);
  Eigen::ArrayXd Z1(nx), Z2(nx);
  for (int i = 0; i < nx; ++i) {
    Z1[i] = Zi(f.grid.x(i), 1);
    Z2[i] = Zi(f.grid.x(i), 2);
  }

  FlatteningReport r;
  r.F.resize(nx, ny + 1);
  r.G.resize(nx);
  for (int i = 0; i < nx; ++i) {
    const double H = m.H(i), ay = m.a_y(i);
    for (int j = 0; j <= ny; ++j) {
      const double yh = f.grid.yhat(j), a = m.a(i, yh), y = f.y(i, j);
      const double dy_dx_psi = pxy(i, j) - ay * py(i, j) - a * pyy(i, j); // d_yhat (D_x psi)
      const double c = yh * Z1[i];
      const double dx_c_psiy = yh * Z2[i] * py(i, j) + c * pxy(i, j) - a * (Z1[i] * py(i, j) + c * pyy(i, j));
      const double omega_t = prof.omega_psi(g, y, psi(i, j)) * u(i, j) + prof.omega_y(g, psi(i, j)) * yh * zeta[i] / d;
      r.F(i, j) = Du.xx(i, j) + Du.yy(i, j) + omega_t - c * dy_dx_psi - dx_c_psiy - 2.0 * Z[i] * pyy(i, j) / (H * H);
    }
    const int j = ny;
    const double dxpsi = px(i, j) - m.a(i, d) * py(i, j);
    r.G[i] = Dp.x(i, j) * Du.x(i, j) + Dp.y(i, j) * Du.y(i, j) + g * prof.rho(0.0) * zeta[i] - dxpsi * Z1[i] * d * py(i, j) -
             Z[i] * sqr(py(i, j) / H);
  }

  // v = u - psi_y (y + d) zeta / (xi + d), psi_y to fourth order
  const GridFunction py4 = stencil::dy4<double>(psi, hy);
  GridFunction v(nx, ny + 1);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j <= ny; ++j) v(i, j) = u(i, j) - py4(i, j) / m.H(i) * f.grid.yhat(j) * zeta[i] / d;
  const auto Dv = physical_derivatives<double>(v, f.grid, m);
  for (int i = 0; i < nx; ++i) {
    for (int j = 2; j <= ny - 2; ++j) {
      const double lhs = Dv.xx(i, j) + Dv.yy(i, j) + prof.omega_psi(g, f.y(i, j), psi(i, j)) * v(i, j);
      r.interior = std::max(r.interior, std::abs(lhs - r.F(i, j)));
    }
    const double sh = Dp.x(i, ny) * Dp.xy(i, ny) + Dp.y(i, ny) * Dp.yy(i, ny) + g * prof.rho(0.0);
    const double lhs = Dp.x(i, ny) * Dv.x(i, ny) + Dp.y(i, ny) * Dv.y(i, ny) + sh * zeta[i];
    r.surface = std::max(r.surface, std::abs(lhs - r.G[i]));
  }
  return r;
}

} // namespace stratwave
