#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"

namespace stratwave {

template <typename Scalar>
using GridArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using GridFunction = GridArray<double>;
using ComplexGridFunction = GridArray<std::complex<double>>;

// Uniform tensor grid on the flattened strip. Columns i = 0..nx-1 cover one or more periods
// with x_i = -nx*hx/2 + i*hx (the right end is identified with the left one); rows
// j = 0..ny sit at yhat_j = j*hy, yhat = 0 at the bottom and yhat = d on the surface.
struct Grid {
  int nx = 0;
  int ny = 0;
  double length = 0.0; // x-extent covered by the nx columns
  double depth = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double length_, double depth_) : nx(nx_), ny(ny_), length(length_), depth(depth_) {
    if (nx < 4 || nx % 2 != 0) throw InvalidInput("grid: nx must be even and >= 4");
    if (ny < 4) throw InvalidInput("grid: ny must be >= 4");
    if (!(length > 0.0) || !(depth > 0.0)) throw InvalidInput("grid: extents must be positive");
  }

  double hx() const { return length / nx; }
  double hy() const { return depth / ny; }
  // symmetric about x = 0 to the last bit: x_{nx-i} = -x_i
  double x(int i) const { return (i - nx / 2) * hx(); }
  double yhat(int j) const { return j * hy(); }
  // mirror column of i under x -> -x
  int mirror(int i) const { return (nx - i) % nx; }

  template <typename Scalar = double>
  GridArray<Scalar> zeros() const {
    return GridArray<Scalar>::Zero(nx, ny + 1);
  }
};

namespace stencil {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// Periodic centered first difference in x. `shift` is tau*hx: the stencil then applies
// exp(-i tau x) d/dx exp(i tau x) exactly at the discrete level.
template <typename Scalar>
GridArray<Scalar> dx(const GridArray<Scalar> &f, double hx, double shift = 0.0) {
  const int nx = static_cast<int>(f.rows());
  GridArray<Scalar> r(f.rows(), f.cols());
  if constexpr (std::is_same_v<Scalar, double>) {
    for (int i = 0; i < nx; ++i) r.row(i) = (f.row(wrap(i + 1, nx)) - f.row(wrap(i - 1, nx))) / (2.0 * hx);
  } else {
    const std::complex<double> ep = std::polar(1.0, shift), em = std::conj(ep);
    for (int i = 0; i < nx; ++i)
      r.row(i) = (ep * f.row(wrap(i + 1, nx)) - em * f.row(wrap(i - 1, nx))) / (2.0 * hx);
  }
  return r;
}

template <typename Scalar>
GridArray<Scalar> dxx(const GridArray<Scalar> &f, double hx, double shift = 0.0) {
  const int nx = static_cast<int>(f.rows());
  GridArray<Scalar> r(f.rows(), f.cols());
  if constexpr (std::is_same_v<Scalar, double>) {
    for (int i = 0; i < nx; ++i)
      r.row(i) = (f.row(wrap(i + 1, nx)) - 2.0 * f.row(i) + f.row(wrap(i - 1, nx))) / (hx * hx);
  } else {
    const std::complex<double> ep = std::polar(1.0, shift), em = std::conj(ep);
    for (int i = 0; i < nx; ++i)
      r.row(i) = (ep * f.row(wrap(i + 1, nx)) - 2.0 * f.row(i) + em * f.row(wrap(i - 1, nx))) / (hx * hx);
  }
  return r;
}

// Second-order first derivative in yhat: centered inside, one-sided three-point on the ends.
template <typename Scalar>
GridArray<Scalar> dy(const GridArray<Scalar> &f, double hy) {
  const int n = static_cast<int>(f.cols()) - 1;
  GridArray<Scalar> r(f.rows(), f.cols());
  r.col(0) = (-3.0 * f.col(0) + 4.0 * f.col(1) - f.col(2)) / (2.0 * hy);
  for (int j = 1; j < n; ++j) r.col(j) = (f.col(j + 1) - f.col(j - 1)) / (2.0 * hy);
  r.col(n) = (3.0 * f.col(n) - 4.0 * f.col(n - 1) + f.col(n - 2)) / (2.0 * hy);
  return r;
}

template <typename Scalar>
GridArray<Scalar> dyy(const GridArray<Scalar> &f, double hy) {
  const int n = static_cast<int>(f.cols()) - 1;
  GridArray<Scalar> r(f.rows(), f.cols());
  r.col(0) = (2.0 * f.col(0) - 5.0 * f.col(1) + 4.0 * f.col(2) - f.col(3)) / (hy * hy);
  for (int j = 1; j < n; ++j) r.col(j) = (f.col(j + 1) - 2.0 * f.col(j) + f.col(j - 1)) / (hy * hy);
  r.col(n) = (2.0 * f.col(n) - 5.0 * f.col(n - 1) + 4.0 * f.col(n - 2) - f.col(n - 3)) / (hy * hy);
  return r;
}

// Fourth-order first derivative in yhat (five-point one-sided near the ends).
template <typename Scalar>
GridArray<Scalar> dy4(const GridArray<Scalar> &f, double hy) {
  const int n = static_cast<int>(f.cols()) - 1;
  GridArray<Scalar> r(f.rows(), f.cols());
  const double s = 1.0 / (12.0 * hy);
  r.col(0) = s * (-25.0 * f.col(0) + 48.0 * f.col(1) - 36.0 * f.col(2) + 16.0 * f.col(3) - 3.0 * f.col(4));
  r.col(1) = s * (-3.0 * f.col(0) - 10.0 * f.col(1) + 18.0 * f.col(2) - 6.0 * f.col(3) + f.col(4));
  for (int j = 2; j <= n - 2; ++j) r.col(j) = s * (-f.col(j + 2) + 8.0 * f.col(j + 1) - 8.0 * f.col(j - 1) + f.col(j - 2));
  r.col(n - 1) = -s * (-3.0 * f.col(n) - 10.0 * f.col(n - 1) + 18.0 * f.col(n - 2) - 6.0 * f.col(n - 3) + f.col(n - 4));
  r.col(n) = -s * (-25.0 * f.col(n) + 48.0 * f.col(n - 1) - 36.0 * f.col(n - 2) + 16.0 * f.col(n - 3) - 3.0 * f.col(n - 4));
  return r;
}

// Periodic fourth-order first derivative in x.
template <typename Scalar>
GridArray<Scalar> dx4(const GridArray<Scalar> &f, double hx) {
  const int nx = static_cast<int>(f.rows());
  GridArray<Scalar> r(f.rows(), f.cols());
  for (int i = 0; i < nx; ++i)
    r.row(i) = (-f.row(wrap(i + 2, nx)) + 8.0 * f.row(wrap(i + 1, nx)) - 8.0 * f.row(wrap(i - 1, nx)) +
                f.row(wrap(i - 2, nx))) /
               (12.0 * hx);
  return r;
}

} // namespace stencil

// Trigonometric interpolant of periodic samples taken at x_i = -L/2 + i*L/n (n even).
class PeriodicInterpolant {
public:
  PeriodicInterpolant() = default;
  PeriodicInterpolant(const Eigen::ArrayXd &samples, double length) : length_(length) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 || n % 2 != 0) throw InvalidInput("periodic interpolant needs an even sample count");
    const double w = 2.0 * pi / length;
    half_ = n / 2;
    a_.assign(half_ + 1, 0.0);
    b_.assign(half_ + 1, 0.0);
    for (int k = 0; k <= half_; ++k) {
      for (int i = 0; i < n; ++i) {
        const double x = (i - n / 2) * (length / n);
        a_[k] += samples[i] * std::cos(k * w * x);
        b_[k] += samples[i] * std::sin(k * w * x);
      }
      a_[k] *= 2.0 / n;
      b_[k] *= 2.0 / n;
    }
    a_[0] *= 0.5;
    a_[half_] *= 0.5;
    b_[half_] = 0.0;
  }

  // derivative of the given order (0, 1 or 2) at x
  double operator()(double x, int order = 0) const {
    const double w = 2.0 * pi / length_;
    double s = order == 0 ? a_[0] : 0.0;
    for (int k = 1; k <= half_; ++k) {
      const double kw = k * w, c = std::cos(kw * x), sn = std::sin(kw * x);
      switch (order) {
      case 0:
        s += a_[k] * c + b_[k] * sn;
        break;
      case 1:
        s += kw * (-a_[k] * sn + b_[k] * c);
        break;
      default:
        s -= kw * kw * (a_[k] * c + b_[k] * sn);
        break;
      }
    }
    return s;
  }

private:
  double length_ = 1.0;
  int half_ = 0;
  std::vector<double> a_, b_;
};

// Spectral x-derivative of every row-direction profile of f (columns of samples in x).
inline GridFunction dx_spectral(const GridFunction &f, double length, int order = 1) {
  GridFunction r(f.rows(), f.cols());
  const int n = static_cast<int>(f.rows());
  for (int j = 0; j < f.cols(); ++j) {
    const PeriodicInterpolant p(f.col(j), length);
    for (int i = 0; i < n; ++i) r(i, j) = p((i - n / 2) * (length / n), order);
  }
  return r;
}

// Metric of the flattening map (x, yhat) -> (x, y = yhat (xi + d)/d - d) sampled on a grid.
struct FlatteningMetric {
  Eigen::ArrayXd xi, xi1, xi2; // surface and its first two x-derivatives per column
  double depth = 1.0;

  double H(int i) const { return (xi[i] + depth) / depth; }
  double a(int i, double yh) const { return yh * xi1[i] / (xi[i] + depth); }
  double a_x(int i, double yh) const {
    const double s = xi[i] + depth;
    return yh * (xi2[i] * s - xi1[i] * xi1[i]) / (s * s);
  }
  double a_y(int i) const { return xi1[i] / (xi[i] + depth); }
  double H_x(int i) const { return xi1[i] / depth; }
  double y(int i, double yh) const { return yh * H(i) - depth; }
};

inline FlatteningMetric make_metric(const Eigen::ArrayXd &xi, double length, double depth) {
  FlatteningMetric m;
  m.depth = depth;
  m.xi = xi;
  const PeriodicInterpolant p(xi, length);
  const int n = static_cast<int>(xi.size());
  m.xi1.resize(n);
  m.xi2.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i - n / 2) * (length / n);
    m.xi1[i] = p(x, 1);
    m.xi2[i] = p(x, 2);
  }
  return m;
}

// Physical derivatives of a grid function through the flattening chain rule.
template <typename Scalar>
struct PhysicalDerivatives {
  GridArray<Scalar> x, y, xx, yy, xy;

  GridArray<Scalar> laplacian() const { return xx + yy; }
};

// `shift` = tau*hx turns d/dx into d/dx + i tau (complex Scalar only).
template <typename Scalar>
PhysicalDerivatives<Scalar> physical_derivatives(const GridArray<Scalar> &f, const Grid &g,
                                                 const FlatteningMetric &m, double shift = 0.0) {
  const double hx = g.hx(), hy = g.hy();
  const GridArray<Scalar> fx = stencil::dx<Scalar>(f, hx, shift);
  const GridArray<Scalar> fy = stencil::dy<Scalar>(f, hy);
  const GridArray<Scalar> fxx = stencil::dxx<Scalar>(f, hx, shift);
  const GridArray<Scalar> fyy = stencil::dyy<Scalar>(f, hy);
  const GridArray<Scalar> fxy = stencil::dx<Scalar>(fy, hx, shift);
  PhysicalDerivatives<Scalar> d;
  d.x.resizeLike(f);
  d.y.resizeLike(f);
  d.xx.resizeLike(f);
  d.yy.resizeLike(f);
  d.xy.resizeLike(f);
  for (int i = 0; i < f.rows(); ++i) {
    const double H = m.H(i), Hx = m.H_x(i), ay = m.a_y(i);
    for (int j = 0; j < f.cols(); ++j) {
      const double yh = g.yhat(j);
      const double a = m.a(i, yh), ax = m.a_x(i, yh);
      d.x(i, j) = fx(i, j) - a * fy(i, j);
      d.y(i, j) = fy(i, j) / H;
      d.xx(i, j) = fxx(i, j) - 2.0 * a * fxy(i, j) + a * a * fyy(i, j) - (ax - a * ay) * fy(i, j);
      d.yy(i, j) = fyy(i, j) / (H * H);
      d.xy(i, j) = (fxy(i, j) - a * fyy(i, j)) / H - fy(i, j) * Hx / (H * H);
    }
  }
  return d;
}

} // namespace stratwave
