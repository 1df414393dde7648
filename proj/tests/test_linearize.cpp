#include <gtest/gtest.h>

#include <cmath>

#include <stratwave/linearize.hpp>

#include "oracles.hpp"

using namespace stratwave;

namespace {

FlowParameters bench(double g = 2.0) {
  FlowParameters p;
  p.g = g;
  return p;
}

struct Setup {
  FluidProfiles prof = make_profiles(ProfileKind::Constant, {});
  LaminarProfile lp = solve_laminar(prof, bench());
  Bifurcation bif = *bifurcation_tau(lp, prof);
};

const Setup &setup() {
  static const Setup s;
  return s;
}

GridFunction sample(const WaveField &f, double (*fn)(double, double)) {
  GridFunction u = f.grid.zeros();
  for (int i = 0; i < f.grid.nx; ++i)
    for (int j = 0; j <= f.grid.ny; ++j) u(i, j) = fn(f.grid.x(i), f.y(i, j));
  return u;
}

double harmonic(double x, double y) { return std::cos(x) * std::sinh(y + 1.0); }

double interior_sup(const GridFunction &a, int margin = 1) {
  return a.block(0, margin, a.rows(), a.cols() - 2 * margin).abs().maxCoeff();
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

// second-order decay, or already at round-off level
bool converges(double coarse, double fine) { return fine < 1e-9 || order(coarse, fine) >= 1.8; }

} // namespace

TEST(Coefficients, UniformLaminar) {
  const auto f = laminar_field(setup().lp, 16, 8);
  const auto c = coefficients(f, setup().prof);
  EXPECT_EQ(c.omega_star.abs().maxCoeff(), 0.0);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(c.sigma[i], -2.0, 1e-10);
}

TEST(Coefficients, LinearDensityHasNoOmegaStar) {
  ProfileParameters pp;
  pp.slope = 0.1;
  pp.beta0 = 0.5;
  const auto prof = make_profiles(ProfileKind::LinearRhoConstantBeta, pp);
  const auto lp = solve_laminar(prof, bench(1.0));
  const auto c = coefficients(laminar_field(lp, 8, 8), prof);
  EXPECT_EQ(c.omega_star.abs().maxCoeff(), 0.0);
}

TEST(Coefficients, SigmaFirstOrderExpansion) {
  // sigma = (psi_y psi_yy + g) / psi_y on psi = -y + t cos(kx) sinh(k(y+1))/sinh(k), k coth k = g:
  // sigma = -g + t cos(kx) (k^2 - g^2) + O(t^2)
  const double g = 2.0, k = oracle::uniform_flow_kappa(g, 1.0);
  double prev = 0.0;
  for (double t : {0.02, 0.01}) {
    const auto f = stokes_field(setup().lp, setup().bif.mode, t, 64, 64);
    const auto c = coefficients(f, setup().prof);
    double err = 0.0;
    for (int i = 0; i < 64; ++i)
      err = std::max(err, std::abs(c.sigma[i] - (-g + t * std::cos(k * f.grid.x(i)) * (k * k - g * g))));
    EXPECT_LT(err, 10 * t * t);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.5);
    prev = err;
    for (int i = 1; i < 32; ++i) EXPECT_NEAR(c.sigma[i], c.sigma[64 - i], 1e-12);
  }
}

TEST(ApplyAB, ZeroAndLinearity) {
  const auto f = stokes_field(setup().lp, setup().bif.mode, 0.01, 32, 16);
  const auto c = coefficients(f, setup().prof);
  const auto z = apply_AB(c, f, f.grid.zeros());
  EXPECT_EQ(z.Au.abs().maxCoeff(), 0.0);
  EXPECT_EQ(z.Bu.abs().maxCoeff(), 0.0);
  const GridFunction u = sample(f, harmonic), v = sample(f, [](double x, double y) { return y * y * std::sin(x); });
  const auto a = apply_AB(c, f, u), b = apply_AB(c, f, v), ab = apply_AB(c, f, u + v);
  EXPECT_LT((ab.Au - a.Au - b.Au).abs().maxCoeff(), 1e-12);
  EXPECT_LT((ab.Bu - a.Bu - b.Bu).abs().maxCoeff(), 1e-12);
}

TEST(ApplyAB, HarmonicConvergesAtSecondOrder) {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const auto f = laminar_field(setup().lp, n, n / 2);
    const auto r = apply_AB(coefficients(f, setup().prof), f, sample(f, harmonic));
    const double e = interior_sup(r.Au);
    if (prev > 0.0) EXPECT_GE(order(prev, e), 1.8);
    prev = e;
  }
}

TEST(ApplyAB, PsiXIsNearKernel) {
  const double t = 0.01;
  const auto f = stokes_field(setup().lp, setup().bif.mode, t, 64, 32);
  const auto c = coefficients(f, setup().prof);
  const auto D = physical_derivatives<double>(f.psi, f.grid, f.metric());
  const auto r = apply_AB(c, f, D.x);
  const double h2 = sqr(f.grid.hx()) + sqr(f.grid.hy());
  // normalized by |psi_x| ~ t
  EXPECT_LT(interior_sup(r.Au) / t, 10 * (h2 + t * t));
  EXPECT_LT(r.Bu.abs().maxCoeff() / t, 10 * (h2 + t * t));
}

TEST(Hodograph, UniformLaminarIsAffine) {
  const auto f = laminar_field(setup().lp, 16, 16);
  const auto hf = hodograph_build(f);
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(hf.h(i, 0), 0.0);
    for (int k = 0; k <= hf.np; ++k) {
      EXPECT_NEAR(hf.h(i, k), 1.0 + hf.p(k), 1e-10);
      EXPECT_NEAR(hf.h_p(i, k), 1.0, 1e-9);
    }
  }
  EXPECT_NEAR(hf.delta, 1.0, 1e-9);
}

TEST(Hodograph, VelocityIdentityOnStokesField) {
  const double t = 0.01;
  const auto f = stokes_field(setup().lp, setup().bif.mode, t, 64, 32);
  const auto hf = hodograph_build(f);
  const auto D = physical_derivatives<double>(f.psi, f.grid, f.metric());
  std::vector<double> yc(33), pc(33);
  double err = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j <= 32; ++j) {
      yc[j] = f.y(i, j);
      pc[j] = D.x(i, j);
    }
    for (int k = 2; k <= hf.np - 2; ++k) {
      const double ux = detail::lagrange_column(yc, pc, hf.h(i, k) - 1.0);
      err = std::max(err, std::abs(ux - hf.h_q(i, k) / hf.h_p(i, k)));
    }
  }
  EXPECT_LT(err / t, 10 * (sqr(f.grid.hx()) + sqr(f.grid.hy()) + t * t));
}

TEST(Hodograph, RejectsNonMonotoneColumn) {
  const Grid grid(8, 8, 2 * pi, 1.0);
  const auto f = field_from_physical(bench(), grid, Eigen::ArrayXd::Zero(8), [](double, double y) { return y * y - 1.0 + 0.0 * y; });
  EXPECT_THROW(hodograph_build(f), InvalidInput);
}

TEST(HodographFrechet, WideStencilOracle) {
  // For h = 1 + p the operator is -w_pp - w_qq, each second derivative taken as a centred
  // difference of a centred difference.
  const auto f = laminar_field(setup().lp, 16, 16);
  const auto hf = hodograph_build(f);
  GridFunction w(16, 17);
  for (int i = 0; i < 16; ++i)
    for (int k = 0; k <= 16; ++k) w(i, k) = std::sin(pi * hf.p(k) / hf.p0) * (1.0 + 0.3 * std::cos(hf.q(i)) + 0.1 * std::sin(2 * hf.q(i)));
  const auto r = apply_hodograph_frechet(hf, setup().prof, w);
  const double dq = hf.hq_step(), dp = hf.hp_step();
  for (int i = 0; i < 16; ++i)
    for (int k = 2; k <= 14; ++k) {
      const double wpp = (w(i, k + 2) - 2 * w(i, k) + w(i, k - 2)) / (4 * dp * dp);
      const double wqq = (w((i + 2) % 16, k) - 2 * w(i, k) + w((i + 14) % 16, k)) / (4 * dq * dq);
      EXPECT_NEAR(r.Fw(i, k), -wpp - wqq, 1e-10);
    }
  const auto zero = apply_hodograph_frechet(hf, setup().prof, GridFunction::Zero(16, 17));
  EXPECT_EQ(zero.Fw.abs().maxCoeff(), 0.0);
}

TEST(HodographFrechet, QDerivativeIsNearKernel) {
  const double t = 0.01;
  const auto f = stokes_field(setup().lp, setup().bif.mode, t, 64, 32);
  const auto hf = hodograph_build(f);
  const auto r = apply_hodograph_frechet(hf, setup().prof, hf.h_q);
  const double bound = 10 * t * (sqr(hf.hq_step()) + sqr(hf.hp_step()) + t * t);
  EXPECT_LT(interior_sup(r.Fw, 2), bound);
  EXPECT_LT(r.Gw.abs().maxCoeff(), bound);
}

TEST(HodographEquivalence, ZeroInput) {
  const auto f = laminar_field(setup().lp, 16, 16);
  const GridFunction z = f.grid.zeros();
  const auto r = verify_hodograph_equivalence(f, setup().prof, z, z, Eigen::ArrayXd::Zero(16));
  EXPECT_EQ(r.interior, 0.0);
  EXPECT_EQ(r.surface, 0.0);
}

TEST(HodographEquivalence, LaminarRefinementOrder) {
  std::vector<HodographCheck> rs;
  for (int n : {32, 64, 128}) {
    const auto f = laminar_field(setup().lp, n, n / 2);
    const auto c = coefficients(f, setup().prof);
    const GridFunction u = sample(f, harmonic);
    const auto ab = apply_AB(c, f, u);
    rs.push_back(verify_hodograph_equivalence(f, setup().prof, u, ab.Au, ab.Bu));
  }
  EXPECT_TRUE(converges(rs[0].interior, rs[1].interior));
  EXPECT_TRUE(converges(rs[1].interior, rs[2].interior));
  EXPECT_TRUE(converges(rs[1].surface, rs[2].surface));
}

TEST(HodographEquivalence, PsiXOnStokesField) {
  const double t = 0.01;
  const auto f = stokes_field(setup().lp, setup().bif.mode, t, 64, 32);
  const auto c = coefficients(f, setup().prof);
  const auto D = physical_derivatives<double>(f.psi, f.grid, f.metric());
  const auto ab = apply_AB(c, f, D.x);
  const auto r = verify_hodograph_equivalence(f, setup().prof, D.x, ab.Au, ab.Bu);
  const double bound = 10 * t * (sqr(f.grid.hx()) + sqr(f.grid.hy()) + t * t);
  EXPECT_LT(r.interior, bound);
  EXPECT_LT(r.surface, bound);
}

TEST(Flattening, ZeroInputs) {
  const auto f = laminar_field(setup().lp, 16, 8);
  const auto r = flattening_frechet(f, setup().prof, f.grid.zeros(), Eigen::ArrayXd::Zero(16));
  EXPECT_EQ(r.F.abs().maxCoeff(), 0.0);
  EXPECT_EQ(r.G.abs().maxCoeff(), 0.0);
  EXPECT_EQ(r.interior, 0.0);
  EXPECT_EQ(r.surface, 0.0);
}

TEST(Flattening, NoSurfaceVariationReducesToLaplacian) {
  const auto f = stokes_field(setup().lp, setup().bif.mode, 0.02, 32, 16);
  GridFunction u = sample(f, [](double x, double y) { return std::cos(x) * std::sin(pi * y); });
  const auto r = flattening_frechet(f, setup().prof, u, Eigen::ArrayXd::Zero(32));
  EXPECT_LT(r.interior, 1e-10);
  EXPECT_LT(r.surface, 1e-10);
}

TEST(Flattening, SurfaceVariationRefinementOrder) {
  ProfileParameters pp;
  pp.slope = 0.1;
  pp.beta0 = 0.5;
  const auto lin = make_profiles(ProfileKind::LinearRhoConstantBeta, pp);
  const auto lp_lin = solve_laminar(lin, bench(1.0));
  for (const auto &[prof, lp] : {std::pair{setup().prof, setup().lp}, std::pair{lin, lp_lin}}) {
    std::vector<FlatteningReport> rs;
    for (int n : {16, 32, 64}) {
      const auto f = laminar_field(lp, n, n);
      Eigen::ArrayXd zeta(n);
      for (int i = 0; i < n; ++i) zeta[i] = std::cos(f.grid.x(i));
      rs.push_back(flattening_frechet(f, prof, f.grid.zeros(), zeta));
    }
    EXPECT_TRUE(converges(rs[1].interior, rs[2].interior));
    EXPECT_TRUE(converges(rs[1].surface, rs[2].surface));
  }
}
