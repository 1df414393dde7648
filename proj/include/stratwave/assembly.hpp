#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "flow.hpp"
#include "grid.hpp"
#include "linearize.hpp"

namespace stratwave {

// Biquadratic (9-node) elements on the flattened strip. The node lattice is the field grid:
// Nx node intervals per period and Ny node intervals in yhat, so a cell covers 2 x 2 intervals.
struct Mesh {
  int nx = 0;      // node intervals per period (divisible by 4)
  int ny = 0;      // node intervals in yhat (even)
  int periods = 1; // m
  double length = 2.0 * pi, depth = 1.0;
  PeriodicInterpolant xi;
  GridFunction omega_star;       // (m nx + 1) x (ny + 1) nodal values
  Eigen::ArrayXd sigma, psi_y_S; // m nx + 1 surface nodal values

  int columns() const { return periods * nx; } // node intervals over the whole domain
  double hx() const { return length / nx; }
  double hy() const { return depth / ny; }
  double x(int col) const { return (col - columns() / 2) * hx(); }
  double yhat(int row) const { return row * hy(); }
  double half_width() const { return 0.5 * periods * length; }
  double jacobian(double x) const { return (xi(x) + depth) / depth; }
  // index of the single-period field sample with the same x (mod the period)
  int field_index(int col) const { return stencil::wrap(col - columns() / 2 + nx / 2, nx); }
};

inline Mesh build_mesh(const WaveField &f, const LinearizedCoefficients &c, int m = 1) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  if (m < 1) throw InvalidInput("period multiple must be at least 1");
  if (nx % 4 != 0) throw InvalidInput("Nx must be divisible by 4");
  if (ny % 2 != 0) throw InvalidInput("Ny must be even");
  if ((f.xi + f.params.d).minCoeff() <= 0.0) throw InvalidInput("surface touches the bottom (xi + d <= 0)");
  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.periods = m;
  mesh.length = f.grid.length;
  mesh.depth = f.params.d;
  mesh.xi = PeriodicInterpolant(f.xi, f.grid.length);
  const int cols = m * nx;
  mesh.omega_star.resize(cols + 1, ny + 1);
  mesh.sigma.resize(cols + 1);
  mesh.psi_y_S.resize(cols + 1);
  for (int col = 0; col <= cols; ++col) {
    const int i = mesh.field_index(col);
    mesh.omega_star.row(col) = c.omega_star.row(i);
    mesh.sigma[col] = c.sigma[i];
    mesh.psi_y_S[col] = c.psi_y_S[i];
  }
  return mesh;
}

enum class BoundaryCondition { PeriodicEven, PeriodicFull, DirichletSides, NeumannSides, HalfDD, HalfDN, HalfND, HalfNN, Bloch };

inline std::string to_string(BoundaryCondition bc) {
  switch (bc) {
  case BoundaryCondition::PeriodicEven: return "PeriodicEven";
  case BoundaryCondition::PeriodicFull: return "PeriodicFull";
  case BoundaryCondition::DirichletSides: return "DirichletSides";
  case BoundaryCondition::NeumannSides: return "NeumannSides";
  case BoundaryCondition::HalfDD: return "HalfDD";
  case BoundaryCondition::HalfDN: return "HalfDN";
  case BoundaryCondition::HalfND: return "HalfND";
  case BoundaryCondition::HalfNN: return "HalfNN";
  case BoundaryCondition::Bloch: return "Bloch";
  }
  return "?";
}

struct AssemblyOptions {
  std::function<double(double)> vol_weight;  // a(x) > 0, default 1
  std::function<double(double)> surf_weight; // b(x) > 0, default 1
  double tau = 0.0;                          // Bloch quasimomentum
  bool dirichlet_top = false;                // restrict to u = 0 on the surface as well
};

struct NodeLink {
  int dof = -1; // -1: constrained to zero
  cplx coef = 1.0;
};

template <typename Scalar>
struct SpectralProblem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BoundaryCondition bc = BoundaryCondition::PeriodicFull;
  double tau = 0.0;
  int ndof = 0;
  Matrix A, M_vol, M_surf;
  std::vector<bool> surface; // dof lies on the free surface
  // lattice node (col, row) -> dof, (m nx + 1) x (ny + 1) row-major by column
  std::vector<NodeLink> links;
  int columns = 0, rows = 0;

  const NodeLink &link(int col, int row) const { return links[static_cast<std::size_t>(col) * (rows + 1) + row]; }

  // nodal values on the full lattice from a dof vector
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> expand(const Vector &v) const {
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> u =
        Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(columns + 1, rows + 1);
    for (int c = 0; c <= columns; ++c)
      for (int r = 0; r <= rows; ++r) {
        const auto &l = link(c, r);
        if (l.dof >= 0) u(c, r) = convert(l.coef) * v[l.dof];
      }
    return u;
  }

  // dof vector from nodal values (first lattice node of each dof wins)
  Vector restrict(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> &u) const {
    Vector v = Vector::Zero(ndof);
    std::vector<bool> seen(ndof, false);
    for (int c = 0; c <= columns; ++c)
      for (int r = 0; r <= rows; ++r) {
        const auto &l = link(c, r);
        if (l.dof >= 0 && !seen[l.dof]) {
          v[l.dof] = u(c, r) / convert(l.coef);
          seen[l.dof] = true;
        }
      }
    return v;
  }

  static Scalar convert(cplx z) {
    if constexpr (std::is_same_v<Scalar, double>) return z.real();
    else return z;
  }
};

namespace detail {

struct Quadratic {
  static double phi(int a, double s) {
    switch (a) {
    case 0: return 2.0 * (s - 0.5) * (s - 1.0);
    case 1: return -4.0 * s * (s - 1.0);
    default: return 2.0 * s * (s - 0.5);
    }
  }
  static double dphi(int a, double s) {
    switch (a) {
    case 0: return 4.0 * s - 3.0;
    case 1: return -8.0 * s + 4.0;
    default: return 4.0 * s - 1.0;
    }
  }
};

inline constexpr std::array<double, 3> gauss_s = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
inline constexpr std::array<double, 3> gauss_w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Column range and node links for every boundary-condition family.
struct Layout {
  int first_cell = 0, last_cell = 0; // cells in x, half-open
  std::vector<NodeLink> links;
  int ndof = 0;
  std::vector<bool> surface;
};

inline Layout make_layout(const Mesh &mesh, BoundaryCondition bc, double tau, bool dirichlet_top) {
  using BC = BoundaryCondition;
  const int cols = mesh.columns(), rows = mesh.ny;
  Layout L;
  L.links.assign(static_cast<std::size_t>(cols + 1) * (rows + 1), NodeLink{});
  auto at = [&](int c, int r) -> NodeLink & { return L.links[static_cast<std::size_t>(c) * (rows + 1) + r]; };
  const bool half = bc == BC::HalfDD || bc == BC::HalfDN || bc == BC::HalfND || bc == BC::HalfNN;
  const int c0 = half ? cols / 2 : 0;
  L.first_cell = c0 / 2;
  L.last_cell = cols / 2;
  const int r_top = dirichlet_top ? rows - 1 : rows;

  // owner column for a lattice column (identification), or -1 when the column is constrained
  std::vector<int> owner(cols + 1, -1);
  std::vector<cplx> phase(cols + 1, 1.0);
  for (int c = c0; c <= cols; ++c) owner[c] = c;
  switch (bc) {
  case BC::PeriodicFull: owner[cols] = 0; break;
  case BC::Bloch: {
    owner[cols] = 0;
    phase[cols] = std::polar(1.0, tau * mesh.periods * mesh.length);
    break;
  }
  case BC::PeriodicEven:
    owner[cols] = 0;
    for (int c = cols / 2 + 1; c < cols; ++c) owner[c] = cols - c;
    break;
  case BC::DirichletSides: owner[0] = owner[cols] = -1; break;
  case BC::NeumannSides: break;
  case BC::HalfDD: owner[c0] = owner[cols] = -1; break;
  case BC::HalfDN: owner[c0] = -1; break;
  case BC::HalfND: owner[cols] = -1; break;
  case BC::HalfNN: break;
  }
  std::vector<int> base(cols + 1, -1);
  for (int c = c0; c <= cols; ++c) {
    if (owner[c] != c) continue;
    base[c] = L.ndof;
    L.ndof += r_top;
    for (int r = 1; r <= r_top; ++r) L.surface.push_back(r == rows);
  }
  for (int c = c0; c <= cols; ++c) {
    if (owner[c] < 0) continue;
    for (int r = 1; r <= r_top; ++r) at(c, r) = NodeLink{base[owner[c]] + r - 1, phase[c]};
  }
  return L;
}

} // namespace detail

// Quadratic forms on the chosen space:
//   A      = int (grad u . grad v - omega* u v) + int (-sigma / psi_y) u v dx (surface),
//   M_vol  = int a(x) u v,  M_surf = int (-b(x) / psi_y) u v dx (surface, positive weight).
template <typename Scalar>
SpectralProblem<Scalar> assemble(const Mesh &mesh, BoundaryCondition bc, const AssemblyOptions &opt = {}) {
  using Problem = SpectralProblem<Scalar>;
  using detail::gauss_s;
  using detail::gauss_w;
  using Q = detail::Quadratic;
  double tau = opt.tau;
  if (bc == BoundaryCondition::Bloch) {
    const double period = 2.0 * pi / (mesh.periods * mesh.length);
    tau = tau - period * std::floor(tau / period);
  }
  if constexpr (std::is_same_v<Scalar, double>)
    if (bc == BoundaryCondition::Bloch && tau != 0.0)
      throw InvalidInput("Bloch problems with tau != 0 need complex assembly");

  const auto layout = detail::make_layout(mesh, bc, tau, opt.dirichlet_top);
  Problem P;
  P.bc = bc;
  P.tau = tau;
  P.ndof = layout.ndof;
  P.surface = layout.surface;
  P.links = layout.links;
  P.columns = mesh.columns();
  P.rows = mesh.ny;
  P.A = Problem::Matrix::Zero(P.ndof, P.ndof);
  P.M_vol = Problem::Matrix::Zero(P.ndof, P.ndof);
  P.M_surf = Problem::Matrix::Zero(P.ndof, P.ndof);

  const double hx2 = 2.0 * mesh.hx(), hy2 = 2.0 * mesh.hy(), d = mesh.depth;
  auto weight_a = [&](double x) { return opt.vol_weight ? opt.vol_weight(x) : 1.0; };
  auto weight_b = [&](double x) { return opt.surf_weight ? opt.surf_weight(x) : 1.0; };

  std::array<NodeLink, 9> nodes;
  Eigen::Matrix<double, 9, 9> K, Mv;
  Eigen::Matrix<double, 3, 3> Ks, Ms;
  auto scatter = [&](typename Problem::Matrix &T, int a, int b, double v) {
    const auto &la = nodes[a], &lb = nodes[b];
    if (la.dof < 0 || lb.dof < 0 || v == 0.0) return;
    T(la.dof, lb.dof) += Problem::convert(std::conj(la.coef) * lb.coef) * v;
  };

  for (int ex = layout.first_cell; ex < layout.last_cell; ++ex) {
    const int c = 2 * ex;
    const double x0 = mesh.x(c);
    std::array<double, 3> gxi, gxi1, gwa, gwb;
    for (int gx = 0; gx < 3; ++gx) {
      const double x = x0 + gauss_s[gx] * hx2;
      gxi[gx] = mesh.xi(x);
      gxi1[gx] = mesh.xi(x, 1);
      gwa[gx] = weight_a(x);
      gwb[gx] = weight_b(x);
    }
    for (int ey = 0; ey < mesh.ny / 2; ++ey) {
      const int r = 2 * ey;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) nodes[3 * a + b] = P.link(c + a, r + b);
      K.setZero();
      Mv.setZero();
      for (int gx = 0; gx < 3; ++gx) {
        const double s = gauss_s[gx];
        const double xi = gxi[gx], xi1 = gxi1[gx], H = (xi + d) / d;
        const double wa = gwa[gx];
        for (int gy = 0; gy < 3; ++gy) {
          const double t = gauss_s[gy], yh = mesh.yhat(r) + t * hy2;
          const double a_coef = yh * xi1 / (xi + d);
          const double w = gauss_w[gx] * gauss_w[gy] * hx2 * hy2 * H;
          double om = 0.0;
          std::array<double, 9> phi, ux, uy;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              const int k = 3 * a + b;
              phi[k] = Q::phi(a, s) * Q::phi(b, t);
              const double dxh = Q::dphi(a, s) * Q::phi(b, t) / hx2, dyh = Q::phi(a, s) * Q::dphi(b, t) / hy2;
              ux[k] = dxh - a_coef * dyh;
              uy[k] = dyh / H;
              om += mesh.omega_star(c + a, r + b) * phi[k];
            }
          for (int k = 0; k < 9; ++k)
            for (int l = 0; l < 9; ++l) {
              K(k, l) += w * (ux[k] * ux[l] + uy[k] * uy[l] - om * phi[k] * phi[l]);
              Mv(k, l) += w * wa * phi[k] * phi[l];
            }
        }
      }
      for (int k = 0; k < 9; ++k)
        for (int l = 0; l < 9; ++l) {
          scatter(P.A, k, l, K(k, l));
          scatter(P.M_vol, k, l, Mv(k, l));
        }
      if (ey == mesh.ny / 2 - 1 && !opt.dirichlet_top) {
        Ks.setZero();
        Ms.setZero();
        for (int gx = 0; gx < 3; ++gx) {
          const double s = gauss_s[gx], w = gauss_w[gx] * hx2;
          double sig = 0.0, py = 0.0;
          for (int a = 0; a < 3; ++a) {
            sig += mesh.sigma[c + a] * Q::phi(a, s);
            py += mesh.psi_y_S[c + a] * Q::phi(a, s);
          }
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              const double pp = Q::phi(a, s) * Q::phi(b, s) * w;
              Ks(a, b) += -sig / py * pp;
              Ms(a, b) += -gwb[gx] / py * pp;
            }
        }
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            scatter(P.A, 3 * a + 2, 3 * b + 2, Ks(a, b));
            scatter(P.M_surf, 3 * a + 2, 3 * b + 2, Ms(a, b));
          }
      }
    }
  }
  return P;
}

// Coordinate-format export: one "row col value" line per nonzero (complex values as "re im").
template <typename Derived>
void write_coordinate(std::ostream &os, const Eigen::MatrixBase<Derived> &m, double drop = 0.0) {
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto v = m(i, j);
      if (std::abs(v) <= drop) continue;
      if constexpr (std::is_same_v<typename Derived::Scalar, double>) os << i << ' ' << j << ' ' << v << '\n';
      else os << i << ' ' << j << ' ' << v.real() << ' ' << v.imag() << '\n';
    }
}

} // namespace stratwave
