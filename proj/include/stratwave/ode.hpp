#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "common.hpp"

namespace stratwave::ode {

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N> &x, double h, std::initializer_list<std::pair<double, const State<N> *>> terms) {
  State<N> r = x;
  for (const auto &[c, k] : terms)
    for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
  return r;
}

} // namespace detail

// Dormand-Prince 5(4) with step-size control. Steps are clipped so that every requested
// output abscissa is hit exactly. `outputs` must be monotone in the direction t0 -> t1.
template <std::size_t N, typename Rhs>
std::vector<State<N>> integrate_to(Rhs &&rhs, double t0, State<N> x, const std::vector<double> &outputs,
                                   double tol = 1e-12, double h0 = 1e-3) {
  std::vector<State<N>> result;
  result.reserve(outputs.size());
  if (outputs.empty()) return result;
  const double dir = outputs.back() >= t0 ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::abs(h0);
  std::size_t next = 0;
  while (next < outputs.size() && dir * (outputs[next] - t) <= 0.0) {
    result.push_back(x);
    ++next;
  }
  int guard = 0;
  while (next < outputs.size()) {
    if (++guard > 10'000'000) throw SolveFailure("ODE integration exceeded step budget", std::abs(h));
    const double target = outputs[next];
    const double h_free = h;
    bool hits = false;
    if (dir * (t + h - target) >= 0.0) {
      h = target - t;
      hits = true;
    }
    const State<N> k1 = rhs(t, x);
    const State<N> k2 = rhs(t + h / 5.0, detail::axpy<N>(x, h, {{1.0 / 5.0, &k1}}));
    const State<N> k3 = rhs(t + 3.0 * h / 10.0, detail::axpy<N>(x, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
    const State<N> k4 = rhs(t + 4.0 * h / 5.0,
                            detail::axpy<N>(x, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
    const State<N> k5 = rhs(t + 8.0 * h / 9.0,
                            detail::axpy<N>(x, h,
                                            {{19372.0 / 6561.0, &k1},
                                             {-25360.0 / 2187.0, &k2},
                                             {64448.0 / 6561.0, &k3},
                                             {-212.0 / 729.0, &k4}}));
    const State<N> k6 = rhs(t + h, detail::axpy<N>(x, h,
                                                   {{9017.0 / 3168.0, &k1},
                                                    {-355.0 / 33.0, &k2},
                                                    {46732.0 / 5247.0, &k3},
                                                    {49.0 / 176.0, &k4},
                                                    {-5103.0 / 18656.0, &k5}}));
    const State<N> x5 = detail::axpy<N>(x, h,
                                        {{35.0 / 384.0, &k1},
                                         {500.0 / 1113.0, &k3},
                                         {125.0 / 192.0, &k4},
                                         {-2187.0 / 6784.0, &k5},
                                         {11.0 / 84.0, &k6}});
    const State<N> k7 = rhs(t + h, x5);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] + 71.0 / 1920.0 * k4[i] -
                            17253.0 / 339200.0 * k5[i] + 22.0 / 525.0 * k6[i] - 1.0 / 40.0 * k7[i]);
      const double sc = tol * (1.0 + std::max(std::abs(x[i]), std::abs(x5[i])));
      err = std::max(err, std::abs(e) / sc);
    }
    if (err <= 1.0) {
      t = hits ? target : t + h;
      x = x5;
      while (next < outputs.size() && dir * (outputs[next] - t) <= 0.0) {
        result.push_back(x);
        ++next;
      }
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = (hits && err <= 1.0) ? dir * std::max(std::abs(h_free), std::abs(h * fac)) : h * fac;
  }
  return result;
}

template <std::size_t N, typename Rhs>
State<N> integrate(Rhs &&rhs, double t0, const State<N> &x0, double t1, double tol = 1e-12) {
  return integrate_to<N>(std::forward<Rhs>(rhs), t0, x0, std::vector<double>{t1}, tol).front();
}

// Bisection refined root of a scalar function bracketed by [a, b].
template <typename F>
double bisect(F &&f, double a, double b, double xtol = 1e-13, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw SolveFailure("bisection: root not bracketed", std::min(std::abs(fa), std::abs(fb)));
  for (int it = 0; it < max_iter && std::abs(b - a) > xtol * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

} // namespace stratwave::ode
