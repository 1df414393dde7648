#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include <stratwave/assembly.hpp>
#include <stratwave/eigensolve.hpp>

using namespace stratwave;
using BC = BoundaryCondition;

namespace {

struct Bench {
  FluidProfiles prof = make_profiles(ProfileKind::Constant, {});
  LaminarProfile lp = solve_laminar(prof, [] {
    FlowParameters p;
    p.g = 2.0;
    return p;
  }());
  Bifurcation bif = *bifurcation_tau(lp, prof);
};

const Bench &bench() {
  static const Bench b;
  return b;
}

Mesh stokes_mesh(double t, int nx, int ny, int m = 1) {
  const auto f = stokes_field(bench().lp, bench().bif.mode, t, nx, ny);
  return build_mesh(f, coefficients(f, bench().prof), m);
}

Eigen::VectorXd spectrum(const Mesh &mesh, BC bc, double tau = 0.0) {
  AssemblyOptions o;
  o.tau = tau;
  if (bc == BC::Bloch) {
    const auto P = assemble<cplx>(mesh, bc, o);
    return solve_gen<cplx>(P.A, P.M_vol).eigenvalues;
  }
  const auto P = assemble<double>(mesh, bc, o);
  return solve_gen<double>(P.A, P.M_vol).eigenvalues;
}

Eigen::VectorXd merged(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  Eigen::VectorXd r(a.size() + b.size());
  r << a, b;
  std::sort(r.begin(), r.end());
  return r;
}

void expect_same(const Eigen::VectorXd &a, const Eigen::VectorXd &b, int count, double rel = 1e-8) {
  ASSERT_GE(a.size(), count);
  ASSERT_GE(b.size(), count);
  for (int j = 0; j < count; ++j) EXPECT_NEAR(a[j], b[j], rel * std::max(1.0, std::abs(a[j]))) << "j = " << j;
}

} // namespace

TEST(Mesh, LaminarHasUnitJacobian) {
  const auto f = laminar_field(bench().lp, 16, 8);
  const auto mesh = build_mesh(f, coefficients(f, bench().prof));
  for (double x : {-3.0, -1.0, 0.0, 0.4, 2.9}) EXPECT_NEAR(mesh.jacobian(x), 1.0, 1e-14);
}

TEST(Mesh, StokesJacobianDeviationIsLinearInAmplitude) {
  auto deviation = [](double t) {
    const auto mesh = stokes_mesh(t, 48, 8);
    double dev = 0.0;
    for (int k = 0; k <= 200; ++k) dev = std::max(dev, std::abs(mesh.jacobian(-pi + k * 2 * pi / 200 / 0.9) - 1.0));
    return dev;
  };
  const double d1 = deviation(0.01), d2 = deviation(0.005);
  EXPECT_GT(d1, 0.0);
  EXPECT_NEAR(d1 / d2, 2.0, 0.05);
}

TEST(Mesh, MultiPeriodEndpointsAreNodes) {
  const auto mesh = stokes_mesh(0.01, 16, 8, 3);
  EXPECT_NEAR(mesh.x(0), -1.5 * mesh.length, 1e-12);
  EXPECT_NEAR(mesh.x(mesh.columns()), 1.5 * mesh.length, 1e-12);
  EXPECT_NEAR(mesh.x(mesh.columns() / 2), 0.0, 1e-14);
}

TEST(Mesh, RejectsBadGrids) {
  const auto f = laminar_field(bench().lp, 18, 8);
  EXPECT_THROW(build_mesh(f, coefficients(f, bench().prof)), InvalidInput);
  const auto g = laminar_field(bench().lp, 16, 7);
  EXPECT_THROW(build_mesh(g, coefficients(g, bench().prof)), InvalidInput);
}

TEST(Assembly, SymmetricForEveryFamily) {
  const auto mesh = stokes_mesh(0.02, 16, 8);
  for (BC bc : {BC::PeriodicEven, BC::PeriodicFull, BC::DirichletSides, BC::NeumannSides, BC::HalfDD, BC::HalfDN, BC::HalfND,
                BC::HalfNN}) {
    const auto P = assemble<double>(mesh, bc);
    EXPECT_LE((P.A - P.A.transpose()).norm() / P.A.norm(), 1e-13) << to_string(bc);
    EXPECT_LE((P.M_vol - P.M_vol.transpose()).norm(), 1e-15 * P.M_vol.norm());
  }
  AssemblyOptions o;
  o.tau = 0.3;
  const auto P = assemble<cplx>(mesh, BC::Bloch, o);
  EXPECT_LE((P.A - P.A.adjoint()).norm() / P.A.norm(), 1e-13);
}

TEST(Assembly, BlochAtZeroIsPeriodic) {
  const auto mesh = stokes_mesh(0.02, 16, 8);
  const auto B = assemble<cplx>(mesh, BC::Bloch);
  const auto P = assemble<double>(mesh, BC::PeriodicFull);
  EXPECT_EQ((B.A - P.A.cast<cplx>()).norm(), 0.0);
  EXPECT_EQ((B.M_vol - P.M_vol.cast<cplx>()).norm(), 0.0);
}

TEST(Assembly, BlochReducesModulo) {
  const auto mesh = stokes_mesh(0.02, 16, 8);
  AssemblyOptions o;
  o.tau = 0.25 + 2 * pi / mesh.length;
  const auto a = assemble<cplx>(mesh, BC::Bloch, o);
  o.tau = 0.25;
  const auto b = assemble<cplx>(mesh, BC::Bloch, o);
  EXPECT_NEAR(a.tau, b.tau, 1e-12);
  EXPECT_LE((a.A - b.A).norm(), 1e-10 * b.A.norm());
}

TEST(Assembly, SurfaceWeightOfUniformFlow) {
  // u = y + 1 lies in the element space: a(u, u) = |Omega| + (-sigma / psi_y) Lambda = 2 pi - 2 (2 pi)
  const auto f = laminar_field(bench().lp, 16, 8);
  const auto mesh = build_mesh(f, coefficients(f, bench().prof));
  const auto P = assemble<double>(mesh, BC::PeriodicEven);
  GridFunction u(mesh.columns() + 1, mesh.ny + 1);
  for (int c = 0; c <= mesh.columns(); ++c)
    for (int r = 0; r <= mesh.ny; ++r) u(c, r) = mesh.yhat(r);
  const Eigen::VectorXd x = P.restrict(u);
  EXPECT_NEAR(x.dot(P.A * x), 2 * pi - 2.0 * 2 * pi, 1e-10);
  EXPECT_NEAR(x.dot(P.M_surf * x), 2 * pi, 1e-10); // weight -1/psi_y = 1
}

TEST(Assembly, EvenSubspaceMatchesHalfDomain) {
  const auto mesh = stokes_mesh(0.02, 16, 8);
  expect_same(spectrum(mesh, BC::PeriodicEven), spectrum(mesh, BC::HalfNN), 20);
}

TEST(Assembly, ReflectionUnionProperty) {
  const auto mesh = stokes_mesh(0.02, 16, 8);
  expect_same(spectrum(mesh, BC::DirichletSides), merged(spectrum(mesh, BC::HalfDD), spectrum(mesh, BC::HalfND)), 30);
  expect_same(spectrum(mesh, BC::NeumannSides), merged(spectrum(mesh, BC::HalfNN), spectrum(mesh, BC::HalfDN)), 30);
}

TEST(Assembly, BlochConjugationSymmetry) {
  const auto mesh = stokes_mesh(0.02, 16, 8);
  const double ts = 2 * pi / mesh.length;
  expect_same(spectrum(mesh, BC::Bloch, 0.3 * ts), spectrum(mesh, BC::Bloch, 0.7 * ts), 30, 1e-10);
}

TEST(Assembly, PositiveWithoutPotentialAndSurfaceTerm) {
  auto mesh = stokes_mesh(0.02, 16, 8);
  mesh.sigma.setZero();
  mesh.omega_star.setZero();
  for (BC bc : {BC::PeriodicEven, BC::PeriodicFull, BC::DirichletSides, BC::NeumannSides, BC::HalfDD, BC::HalfDN, BC::HalfND,
                BC::HalfNN})
    EXPECT_GT(spectrum(mesh, bc)[0], 0.0) << to_string(bc);
}

TEST(Assembly, CoordinateExport) {
  const auto mesh = stokes_mesh(0.02, 8, 4);
  const auto P = assemble<double>(mesh, BC::HalfDD);
  std::ostringstream os;
  write_coordinate(os, P.A);
  const std::string text = os.str();
  const auto lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(lines, (P.A.array() != 0.0).count());
}
