#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"

namespace stratwave {

enum class ProfileKind { Constant, LinearRhoConstantBeta, CustomSampled };

inline std::string to_string(ProfileKind k) {
  switch (k) {
  case ProfileKind::Constant:
    return "constant";
  case ProfileKind::LinearRhoConstantBeta:
    return "linear-rho-constant-beta";
  case ProfileKind::CustomSampled:
    return "custom-sampled";
  }
  return "unknown";
}

inline ProfileKind profile_kind_from_string(const std::string &s) {
  if (s == "constant") return ProfileKind::Constant;
  if (s == "linear-rho-constant-beta") return ProfileKind::LinearRhoConstantBeta;
  if (s == "custom-sampled") return ProfileKind::CustomSampled;
  throw InvalidInput("unknown profile kind '" + s + "'");
}

// Parameters accepted by make_profiles. Only the fields relevant to the kind are read.
struct ProfileParameters {
  double rho0 = 1.0;  // density at the surface streamline (s = 0)
  double slope = 0.0; // d rho / ds for the linear kind
  double beta0 = 0.0; // Bernoulli function value (constant for the first two kinds)
  // custom-sampled: uniform samples of rho on s in [p0, 0] and beta on psi in [0, -p0]
  double p0 = -1.0;
  std::vector<double> rho_samples;
  std::vector<double> beta_samples;
};

namespace detail {

// Second-order derivative of uniformly sampled data (one-sided three-point at the ends).
inline std::vector<double> sampled_derivative(const std::vector<double> &f, double h) {
  const std::size_t n = f.size();
  std::vector<double> df(n);
  if (n < 3) {
    std::fill(df.begin(), df.end(), n == 2 ? (f[1] - f[0]) / h : 0.0);
    return df;
  }
  df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) df[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  df[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return df;
}

inline double sample_at(const std::vector<double> &f, double lo, double h, double s) {
  if (f.size() == 1) return f[0];
  const double u = std::clamp((s - lo) / h, 0.0, static_cast<double>(f.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(u), f.size() - 2);
  const double w = u - static_cast<double>(i);
  return (1.0 - w) * f[i] + w * f[i + 1];
}

} // namespace detail

// Density rho(s), s = -psi in [p0, 0], and Bernoulli function beta(psi), psi in [0, -p0],
// together with the derivatives entering the interior equation and its linearization.
class FluidProfiles {
public:
  FluidProfiles() = default;

  ProfileKind kind() const { return kind_; }
  const ProfileParameters &parameters() const { return par_; }

  double rho(double s) const { return eval(rho_, 0, s); }
  double rho1(double s) const { return eval(rho_, 1, s); }
  double rho2(double s) const { return eval(rho_, 2, s); }
  double beta(double psi) const { return eval(beta_, 0, psi); }
  double beta1(double psi) const { return eval(beta_, 1, psi); }

  // omega(y, psi) = -g y rho'(-psi) - beta(psi)
  double omega(double g, double y, double psi) const { return -g * y * rho1(-psi) - beta(psi); }
  // d omega / d psi
  double omega_psi(double g, double y, double psi) const {
    return g * y * rho2(-psi) - beta1(psi);
  }
  // partial d omega / d y at fixed psi
  double omega_y(double g, double psi) const { return -g * rho1(-psi); }

  friend FluidProfiles make_profiles(ProfileKind kind, const ProfileParameters &par);

private:
  struct Table {
    bool affine = true;
    double c0 = 0.0, c1 = 0.0;
    double lo = 0.0, h = 1.0;
    std::vector<double> d[3]; // value, first, second derivative
  };

  static double eval(const Table &t, int order, double s) {
    if (t.affine) return order == 0 ? t.c0 + t.c1 * s : (order == 1 ? t.c1 : 0.0);
    return detail::sample_at(t.d[order], t.lo, t.h, s);
  }

  static Table polynomial(double c0, double c1) {
    Table t;
    t.c0 = c0;
    t.c1 = c1;
    return t;
  }

  ProfileKind kind_ = ProfileKind::Constant;
  ProfileParameters par_;
  Table rho_, beta_;
};

inline FluidProfiles make_profiles(ProfileKind kind, const ProfileParameters &par) {
  FluidProfiles p;
  p.kind_ = kind;
  p.par_ = par;
  switch (kind) {
  case ProfileKind::Constant:
    if (!(par.rho0 > 0.0)) throw InvalidInput("density must be positive");
    p.rho_ = FluidProfiles::polynomial(par.rho0, 0.0);
    p.beta_ = FluidProfiles::polynomial(0.0, 0.0);
    p.par_.slope = 0.0;
    p.par_.beta0 = 0.0;
    break;
  case ProfileKind::LinearRhoConstantBeta: {
    if (!(par.p0 < 0.0)) throw InvalidInput("p0 must be negative");
    const double rho_min = std::min(par.rho0, par.rho0 + par.slope * par.p0);
    if (!(rho_min > 0.0)) throw InvalidInput("density must be positive on [p0, 0]");
    p.rho_ = FluidProfiles::polynomial(par.rho0, par.slope);
    p.beta_ = FluidProfiles::polynomial(par.beta0, 0.0);
    break;
  }
  case ProfileKind::CustomSampled: {
    if (!(par.p0 < 0.0)) throw InvalidInput("p0 must be negative");
    if (par.rho_samples.size() < 3) throw InvalidInput("custom profile needs at least 3 density samples");
    if (std::any_of(par.rho_samples.begin(), par.rho_samples.end(), [](double r) { return !(r > 0.0); }))
      throw InvalidInput("density must be positive on [p0, 0]");
    auto &r = p.rho_;
    r.affine = false;
    r.lo = par.p0;
    r.h = -par.p0 / static_cast<double>(par.rho_samples.size() - 1);
    r.d[0] = par.rho_samples;
    r.d[1] = detail::sampled_derivative(r.d[0], r.h);
    r.d[2] = detail::sampled_derivative(r.d[1], r.h);
    auto &b = p.beta_;
    std::vector<double> bs = par.beta_samples.empty() ? std::vector<double>(3, 0.0) : par.beta_samples;
    if (bs.size() < 2) bs.assign(3, bs.front());
    b.affine = false;
    b.lo = 0.0;
    b.h = -par.p0 / static_cast<double>(bs.size() - 1);
    b.d[0] = bs;
    b.d[1] = detail::sampled_derivative(b.d[0], b.h);
    b.d[2] = detail::sampled_derivative(b.d[1], b.h);
    break;
  }
  }
  return p;
}

} // namespace stratwave
