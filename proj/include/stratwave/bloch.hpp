#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "flow.hpp"
#include "grid.hpp"
#include "linearize.hpp"

namespace stratwave {

// Components V(tau_m, x, y), m = -M..M, of a (2M+1) Lambda-periodic grid function, each
// stored on the single-period grid x_i = (i - nx/2) hx.
struct BlochStack {
  int M = 0;
  double length = 2.0 * pi; // Lambda
  std::vector<ComplexGridFunction> components; // index m + M

  int count() const { return 2 * M + 1; }
  double tau(int m) const { return m * 2.0 * pi / (count() * length); }
  const ComplexGridFunction &operator[](int m) const { return components[static_cast<std::size_t>(m + M)]; }
  ComplexGridFunction &operator[](int m) { return components[static_cast<std::size_t>(m + M)]; }
};

// v sampled at X_I = (I - N/2) hx, I = 0..N-1, N = (2M+1) nx; Lambda = nx hx.
inline BlochStack bloch_forward(const ComplexGridFunction &v, int M, double length) {
  const int N = static_cast<int>(v.rows()), W = 2 * M + 1;
  if (M < 0) throw InvalidInput("window half-width M must be non-negative");
  if (N % W != 0 || (N / W) % 2 != 0) throw InvalidInput("grid is not commensurate with (2M+1) periods");
  const int nx = N / W;
  const double hx = length / nx;
  BlochStack s;
  s.M = M;
  s.length = length;
  s.components.assign(W, ComplexGridFunction::Zero(nx, v.cols()));
  for (int m = -M; m <= M; ++m) {
    const double tm = s.tau(m);
    auto &V = s[m];
    for (int i = 0; i < nx; ++i) {
      const double x = (i - nx / 2) * hx;
      for (int k = -M; k <= M; ++k) {
        const int I = stencil::wrap(i - nx / 2 + N / 2 + k * nx, N);
        V.row(i) += std::polar(1.0, -tm * (x + k * length)) * v.row(I);
      }
    }
  }
  return s;
}

inline BlochStack bloch_forward(const GridFunction &v, int M, double length) {
  return bloch_forward(ComplexGridFunction(v.cast<cplx>()), M, length);
}

// (N V)(X) = sum_m exp(i tau_m X) V(tau_m, X) on the (2M+1)-period grid
inline ComplexGridFunction bloch_synthesis(const BlochStack &s) {
  const int W = s.count(), nx = static_cast<int>(s.components.front().rows());
  const int N = W * nx;
  const double hx = s.length / nx;
  ComplexGridFunction v = ComplexGridFunction::Zero(N, s.components.front().cols());
  for (int I = 0; I < N; ++I) {
    const double X = (I - N / 2) * hx;
    const int i = stencil::wrap(I - N / 2 + nx / 2, nx);
    for (int m = -s.M; m <= s.M; ++m) v.row(I) += std::polar(1.0, s.tau(m) * X) * s[m].row(i);
  }
  return v;
}

inline ComplexGridFunction bloch_inverse(const BlochStack &s) { return bloch_synthesis(s) / static_cast<double>(s.count()); }

namespace detail {

// (2M+1) copies of a single-period field and its coefficients
struct TiledOperator {
  WaveField field;
  LinearizedCoefficients coeffs;
};

inline TiledOperator tile(const WaveField &f, const LinearizedCoefficients &c, int copies) {
  const int nx = f.grid.nx, N = copies * nx;
  TiledOperator t;
  t.field.params = f.params;
  t.field.params.Lambda = copies * f.grid.length;
  t.field.grid = Grid(N, f.grid.ny, copies * f.grid.length, f.grid.depth);
  t.field.psi.resize(N, f.grid.ny + 1);
  t.field.xi.resize(N);
  t.coeffs.omega_star.resize(N, f.grid.ny + 1);
  t.coeffs.sigma.resize(N);
  t.coeffs.psi_x_S.resize(N);
  t.coeffs.psi_y_S.resize(N);
  for (int I = 0; I < N; ++I) {
    const int i = stencil::wrap(I - N / 2 + nx / 2, nx);
    t.field.psi.row(I) = f.psi.row(i);
    t.field.xi[I] = f.xi[i];
    t.coeffs.omega_star.row(I) = c.omega_star.row(i);
    t.coeffs.sigma[I] = c.sigma[i];
    t.coeffs.psi_x_S[I] = c.psi_x_S[i];
    t.coeffs.psi_y_S[I] = c.psi_y_S[i];
  }
  return t;
}

struct ComplexAction {
  ComplexGridFunction Au;
  Eigen::ArrayXcd Bu;
};

// A and B with d/dx replaced by d/dx + i tau
inline ComplexAction apply_AB_shifted(const LinearizedCoefficients &c, const WaveField &f, const FlatteningMetric &m,
                                      const ComplexGridFunction &u, double tau) {
  const auto D = physical_derivatives<cplx>(u, f.grid, m, tau * f.grid.hx());
  const int ny = f.grid.ny;
  ComplexAction r;
  r.Au = D.laplacian() + c.omega_star.cast<cplx>() * u;
  r.Bu = c.psi_x_S.cast<cplx>() * D.x.col(ny) + c.psi_y_S.cast<cplx>() * D.y.col(ny) - c.sigma.cast<cplx>() * u.col(ny);
  return r;
}

inline double weighted_norm2(const ComplexGridFunction &u, const Eigen::ArrayXd &H, double hx, double hy) {
  double s = 0.0;
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j) {
      const double w = (j == 0 || j == u.cols() - 1) ? 0.5 : 1.0;
      s += w * std::norm(u(i, j)) * H[i];
    }
  return s * hx * hy;
}

inline double h2_norm2(const ComplexGridFunction &u, const Grid &g, const FlatteningMetric &m) {
  const auto D = physical_derivatives<cplx>(u, g, m);
  Eigen::ArrayXd H(g.nx);
  for (int i = 0; i < g.nx; ++i) H[i] = m.H(i);
  double s = 0.0;
  for (const ComplexGridFunction *p : {&u, &D.x, &D.y, &D.xx, &D.xy, &D.yy}) s += weighted_norm2(*p, H, g.hx(), g.hy());
  return s;
}

} // namespace detail

struct BlochIdentityReport {
  int M = 0;
  double roundtrip_error = 0.0;     // max |(2M+1)^-1 N M v - v|
  double norm_identity_error = 0.0; // relative
  double commutation_A = 0.0;       // max |A(N V) - sum_m e^{i tau_m x} A_{tau_m} V_m|
  double commutation_B = 0.0;
  double h2_ratio = 0.0;            // sum_m |V_m|_{H^2}^2 / |v|_{H^2(Omega_M)}^2
};

// v lives on (2M+1) copies of the field's period; f and c describe one period.
inline BlochIdentityReport bloch_identities(const GridFunction &v, int M, const WaveField &f, const LinearizedCoefficients &c) {
  const int W = 2 * M + 1, nx = f.grid.nx;
  if (v.rows() != W * nx || v.cols() != f.grid.ny + 1) throw InvalidInput("bloch_identities: grid mismatch");
  BlochIdentityReport r;
  r.M = M;
  const ComplexGridFunction vc = v.cast<cplx>();
  const auto s = bloch_forward(vc, M, f.grid.length);
  r.roundtrip_error = (bloch_inverse(s) - vc).abs().maxCoeff();

  const auto big = detail::tile(f, c, W);
  const auto mbig = big.field.metric();
  const auto msmall = f.metric();
  Eigen::ArrayXd Hs(nx), Hb(W * nx);
  for (int i = 0; i < nx; ++i) Hs[i] = msmall.H(i);
  for (int I = 0; I < W * nx; ++I) Hb[I] = mbig.H(I);
  double lhs = 0.0;
  for (const auto &V : s.components) lhs += detail::weighted_norm2(V, Hs, f.grid.hx(), f.grid.hy());
  const double rhs = W * detail::weighted_norm2(vc, Hb, f.grid.hx(), f.grid.hy());
  r.norm_identity_error = rhs > 0.0 ? std::abs(lhs - rhs) / rhs : std::abs(lhs);

  const auto direct = detail::apply_AB_shifted(big.coeffs, big.field, mbig, bloch_synthesis(s), 0.0);
  ComplexGridFunction sumA = ComplexGridFunction::Zero(W * nx, f.grid.ny + 1);
  Eigen::ArrayXcd sumB = Eigen::ArrayXcd::Zero(W * nx);
  const double hx = f.grid.hx();
  for (int m = -M; m <= M; ++m) {
    const auto act = detail::apply_AB_shifted(c, f, msmall, s[m], s.tau(m));
    for (int I = 0; I < W * nx; ++I) {
      const int i = stencil::wrap(I - W * nx / 2 + nx / 2, nx);
      const cplx ph = std::polar(1.0, s.tau(m) * (I - W * nx / 2) * hx);
      sumA.row(I) += ph * act.Au.row(i);
      sumB[I] += ph * act.Bu[i];
    }
  }
  const double scaleA = std::max(1.0, direct.Au.abs().maxCoeff()), scaleB = std::max(1.0, direct.Bu.abs().maxCoeff());
  r.commutation_A = (direct.Au - sumA).abs().maxCoeff() / scaleA;
  r.commutation_B = (direct.Bu - sumB).abs().maxCoeff() / scaleB;

  double h2s = 0.0;
  for (const auto &V : s.components) h2s += detail::h2_norm2(V, f.grid, msmall);
  const double h2v = detail::h2_norm2(vc, big.field.grid, mbig);
  r.h2_ratio = h2v > 0.0 ? h2s / h2v : 0.0;
  return r;
}

// reproducible test input: uniform noise with a zero bottom row
inline GridFunction random_grid_function(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  GridFunction v(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) v(i, j) = j == 0 ? 0.0 : U(rng);
  return v;
}

} // namespace stratwave
