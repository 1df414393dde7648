#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <stratwave/spectra.hpp>

#include "oracles.hpp"

using namespace stratwave;

namespace {

constexpr double g = 2.0;

LaminarProfile uniform_flow(double Lambda) {
  FlowParameters p;
  p.g = g;
  p.Lambda = Lambda;
  return solve_laminar(make_profiles(ProfileKind::Constant, {}), p);
}

struct Bench {
  FluidProfiles prof = make_profiles(ProfileKind::Constant, {});
  double kappa = oracle::uniform_flow_kappa(g, 1.0);
  LaminarProfile lp = uniform_flow(2 * pi);
  LaminarProfile lp_short = uniform_flow(0.9 * 2 * pi / kappa);
  Mesh laminar = mesh_for(laminar_field(lp, 32, 16), prof);
  Mesh laminar_short = mesh_for(laminar_field(lp_short, 32, 16), prof);
  Bifurcation bif = *bifurcation_tau(lp, prof);
  WaveField stokes = stokes_field(lp, bif.mode, 0.01, 32, 16);
};

const Bench &bench() {
  static const Bench b;
  return b;
}

// eigenvalues (k_n)^2 + nu_j of the uniform flow, sorted
std::vector<double> separable(const std::vector<double> &k, int count) {
  const auto nu = oracle::robin_transverse_eigenvalues(g, 1.0, 4);
  std::vector<double> out;
  for (double kn : k)
    for (double n : nu) out.push_back(kn * kn + n);
  std::sort(out.begin(), out.end());
  out.resize(count);
  return out;
}

std::vector<double> wavenumbers(double step, int first, int last) {
  std::vector<double> k;
  for (int n = first; n <= last; ++n) k.push_back(n * step);
  return k;
}

void expect_close(const Eigen::VectorXd &got, const std::vector<double> &want, double rel) {
  ASSERT_GE(got.size(), static_cast<Eigen::Index>(want.size()));
  for (std::size_t j = 0; j < want.size(); ++j)
    EXPECT_NEAR(got[j], want[j], rel * std::max(1.0, std::abs(want[j]))) << "index " << j;
}

} // namespace

TEST(MuSpectrum, UniformFlowEvenPeriodic) {
  const auto r = mu_spectrum(bench().laminar, BoundaryCondition::PeriodicEven, 6);
  expect_close(r.eigenvalues, separable(wavenumbers(1.0, 0, 8), 6), 0.02);
  EXPECT_EQ(r.negative_count, 2);
}

TEST(MuSpectrum, UniformFlowSideConditions) {
  // sides at a distance Lambda: cosines and sines of n tau* / 2
  const auto N = mu_spectrum(bench().laminar, BoundaryCondition::NeumannSides, 6, default_tol_zero, {}, false);
  const auto D = mu_spectrum(bench().laminar, BoundaryCondition::DirichletSides, 6, default_tol_zero, {}, false);
  expect_close(N.eigenvalues, separable(wavenumbers(0.5, 0, 16), 6), 0.02);
  expect_close(D.eigenvalues, separable(wavenumbers(0.5, 1, 16), 6), 0.02);
}

TEST(MuSpectrum, FullPeriodicContainsEvenAndOdd) {
  const auto full = mu_spectrum(bench().laminar, BoundaryCondition::PeriodicFull, 8, default_tol_zero, {}, false);
  std::vector<double> k = wavenumbers(1.0, 0, 8), neg = wavenumbers(1.0, 1, 8);
  k.insert(k.end(), neg.begin(), neg.end());
  expect_close(full.eigenvalues, separable(k, 8), 0.02);
}

TEST(Steklov, UniformFlowModes) {
  // theta b = k coth k - g for the mode cos(kx), with k coth k -> 1 at k = 0
  const auto r = steklov_spectrum(bench().laminar, BoundaryCondition::PeriodicEven);
  std::vector<double> want;
  for (int n = 0; n < 4; ++n) want.push_back(n == 0 ? 1.0 - g : n / std::tanh(static_cast<double>(n)) - g);
  expect_close(r.eigenvalues, want, 0.01);
  EXPECT_EQ(r.negative_count, 2);
}

TEST(Steklov, ScalesInverselyWithSurfaceWeight) {
  AssemblyOptions opt;
  opt.surf_weight = [](double) { return 2.0; };
  const auto one = steklov_spectrum(bench().laminar, BoundaryCondition::PeriodicEven, {}, 4);
  const auto two = steklov_spectrum(bench().laminar, BoundaryCondition::PeriodicEven, opt, 4);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(two.eigenvalues[j], 0.5 * one.eigenvalues[j], 1e-9);
}

TEST(Steklov, RawSignReversesTheSpectrum) {
  const auto a = steklov_spectrum(bench().laminar, BoundaryCondition::PeriodicEven);
  const auto b = steklov_spectrum(bench().laminar, BoundaryCondition::PeriodicEven, {}, -1, default_tol_zero, true);
  ASSERT_EQ(a.size(), b.size());
  for (int j = 0; j < a.size(); ++j) EXPECT_DOUBLE_EQ(b.eigenvalues[j], -a.eigenvalues[a.size() - 1 - j]);
}

TEST(NegativeCounts, AgreeForSeveralWeights) {
  const double ts = 1.0;
  const std::vector<std::pair<std::function<double(double)>, std::function<double(double)>>> weights = {
      {[](double) { return 1.0; }, [](double) { return 1.0; }},
      {[](double) { return 1.0; }, [](double) { return 2.0; }},
      {[=](double x) { return 1.0 + 0.1 * std::cos(ts * x); }, [](double) { return 1.0; }}};
  for (const auto &[a, b] : weights) {
    const auto c = negative_count_compare(bench().laminar, a, b);
    EXPECT_EQ(c.n_mu, 2);
    EXPECT_TRUE(c.equal);
    EXPECT_TRUE(c.stable);
    EXPECT_TRUE(c.hform.positive);
  }
}

TEST(NegativeCounts, AgreeOnThreePeriods) {
  const auto mesh = mesh_for(laminar_field(bench().lp, 32, 16), bench().prof, 3);
  const auto c = negative_count_compare(mesh, [](double) { return 1.0; }, [](double) { return 1.0; });
  // wavenumbers n / 3 below kappa
  const int expected = static_cast<int>(std::floor(3.0 * bench().kappa)) + 1;
  EXPECT_EQ(c.n_mu, expected);
  EXPECT_EQ(c.n_theta, expected);
}

TEST(Hform, PositiveWithoutPotential) {
  const auto h = hform_positivity(bench().laminar);
  EXPECT_NEAR(h.lambda_min, pi * pi, 0.01 * pi * pi);
  EXPECT_TRUE(h.positive);
}

TEST(Hform, LargePotentialBreaksPositivity) {
  Mesh m = bench().laminar;
  m.omega_star.setConstant(50.0);
  const auto h = hform_positivity(m);
  EXPECT_NEAR(h.lambda_min, pi * pi - 50.0, 0.01 * 50.0);
  EXPECT_FALSE(h.positive);
}

TEST(SideRelations, StokesWaveSatisfiesAllRelations) {
  const auto &b = bench();
  const auto rep = side_relation_report(b.stokes, mesh_for(b.stokes, b.prof), true);
  for (const auto &f : rep.failures()) ADD_FAILURE() << f;
  EXPECT_TRUE(rep.passed());
  EXPECT_GT(rep.psi_x_correlation, 0.999);
  EXPECT_LE(std::abs(rep.named.at("mu2D")), rep.mu2D_bound);
  EXPECT_EQ(rep.spectra.size(), 8u);
}

TEST(SideRelations, LaminarSkipsZeroEigenvalueCheck) {
  const auto &b = bench();
  const auto rep = side_relation_report(laminar_field(b.lp, 32, 16), b.laminar, false);
  const auto it = std::find_if(rep.relations.begin(), rep.relations.end(), [](const Relation &r) { return r.name == "mu2D = 0"; });
  ASSERT_NE(it, rep.relations.end());
  EXPECT_EQ(it->status, "skipped");
}

TEST(BlochSweep, UniformFlowCurves) {
  const auto s = bloch_sweep(bench().laminar, {0.0, 0.25, 0.5, 0.75, 1.0}, 4);
  ASSERT_EQ(s.curves.size(), 5u);
  for (std::size_t i = 0; i < s.taus.size(); ++i) {
    std::vector<double> k;
    for (int n = -8; n <= 8; ++n) k.push_back(std::abs(n + s.taus[i]));
    expect_close(s.curves[i], separable(k, 4), 0.02);
  }
  EXPECT_TRUE(s.weak_interlacing());
  EXPECT_FALSE(s.criterion_holds);
}

TEST(BlochSweep, SymmetricAboutHalfPeriod) {
  const auto s = bloch_sweep(bench().laminar_short, {0.2, 0.8}, 4);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(s.curves[0][j], s.curves[1][j], 1e-8 * std::max(1.0, std::abs(s.curves[0][j])));
  EXPECT_TRUE(s.criterion_holds);
  EXPECT_TRUE(s.zero_free);
}

TEST(BlochSweep, CsvShape) {
  const auto s = bloch_sweep(bench().laminar_short, {0.1, 0.3, 0.5}, 3);
  std::ostringstream os;
  write_sweep_csv(os, s);
  const std::string text = os.str();
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "tau,mu1,mu2,mu3");
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Verdict, LongPeriodFailsCriterion) {
  const auto &b = bench();
  const auto v = uniqueness_verdict(b.laminar, mesh_for(laminar_field(b.lp, 32, 16), b.prof, 3), 8);
  EXPECT_FALSE(v.criterion_holds);
  EXPECT_FALSE(v.subharmonic_excluded);
}

TEST(Verdict, ShortPeriodExcludesSubharmonics) {
  const auto &b = bench();
  const auto v = uniqueness_verdict(b.laminar_short, mesh_for(laminar_field(b.lp_short, 32, 16), b.prof, 3), 8);
  EXPECT_TRUE(v.criterion_holds);
  EXPECT_FALSE(v.inconclusive);
  EXPECT_GT(v.min_abs_mu, 1e-4);
  EXPECT_LT(v.decomposition_error, 1e-8);
  EXPECT_TRUE(v.subharmonic_excluded);
  EXPECT_NEAR(v.mu1, -sqr(b.kappa), 0.02 * sqr(b.kappa));
}

TEST(Verdict, RejectsEvenMultiple) {
  const auto &b = bench();
  EXPECT_THROW(uniqueness_verdict(b.laminar, mesh_for(laminar_field(b.lp, 32, 16), b.prof, 2)), InvalidInput);
}

TEST(BlochSweep, HalfPeriodSpectrumComesFromSideProblems) {
  // antiperiodic eigenfunctions of an x-even problem are side-Dirichlet (even) or side-Neumann (odd)
  const auto &b = bench();
  for (const Mesh *mesh : {&b.laminar_short, &b.laminar}) {
    const auto s = bloch_sweep(*mesh, {0.3, 0.5}, 4);
    const auto N = mu_spectrum(*mesh, BoundaryCondition::NeumannSides, 12, default_tol_zero, {}, false).eigenvalues;
    const auto D = mu_spectrum(*mesh, BoundaryCondition::DirichletSides, 12, default_tol_zero, {}, false).eigenvalues;
    for (int j = 0; j < 4; ++j) {
      const double v = s.curves[1][j];
      const double dist = std::min((N.array() - v).abs().minCoeff(), (D.array() - v).abs().minCoeff());
      EXPECT_LT(dist, 1e-9 * std::max(1.0, std::abs(v)));
    }
    EXPECT_FALSE(s.strict_interlacing());
    EXPECT_TRUE(s.strict_failures_only_at_half_period());
    EXPECT_TRUE(s.weak_interlacing());
  }
}
