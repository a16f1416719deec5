#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "concentra/constants.hpp"
#include "concentra/errors.hpp"
#include "concentra/halfspace_solver.hpp"

using namespace concentra;

namespace {

const std::shared_ptr<const HalfspaceGrid>& grid7() {
  static const auto g = HalfspaceGrid::make(7);
  return g;
}

MonoKey xbar(int i) { return mono_make(std::vector<int>(i, 0) = [&] {
  std::vector<int> e(i + 1, 0);
  e[i] = 1;
  return e;
}()); }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// psi = (xi_1 xi_2 + xi_N^2 - r^2/N) f(r), f = (1 + r^2)^{-N/2}, and g = (-Delta - p w0^{p-1} + eps a) psi
struct Manufactured {
  SymFunction psi, g;
};

Manufactured manufactured(double eps, double a) {
  const auto& g = grid7();
  const int N = g->N(), nr = g->nr(), nt = g->nt();
  auto f = [&](double r) { return std::pow(1 + r * r, -N / 2.0); };
  auto fp = [&](double r) { return -N * r * std::pow(1 + r * r, -N / 2.0 - 1); };
  auto fpp = [&](double r) {
    return -N * std::pow(1 + r * r, -N / 2.0 - 1) + N * (N + 2.0) * r * r * std::pow(1 + r * r, -N / 2.0 - 2);
  };
  Eigen::MatrixXd F(nr, nt), L(nr, nt);
  for (int i = 0; i < nr; ++i) {
    const double r = g->r(i);
    for (int q = 0; q < nt; ++q) {
      F(i, q) = f(r);
      // Laplacian of (degree-2 harmonic) * f(r) = harmonic * (f'' + (N + 3)/r f')
      L(i, q) = r > 0 ? fpp(r) + (N + 3.0) / r * fp(r) : (N + 4.0) * fpp(0.0);
    }
  }
  Poly Y = Poly::variable(N, 0) * Poly::variable(N, 1) + Poly::variable(N, N - 1) * Poly::variable(N, N - 1);
  Y += (-1.0 / N) * Poly::rho2(N);
  Manufactured m{SymFunction(g), SymFunction(g)};
  m.psi.add_poly(Y, F);
  m.g.add_poly(Y, -L - g->potential().cwiseProduct(F) + eps * a * F);
  return m;
}

}  // namespace

TEST_CASE("weighted norm against a dense radial oracle") {
  const auto& g = grid7();
  const int N = 7;
  SymFunction w(g);
  w.add(0, g->w0());
  WeightedNormParams p;
  p.eps = 0.01;
  const double r_w = N - 2.0;
  const double val = weighted_norm(w, r_w, p);
  // dense sup of each regime
  const double R = p.delta / std::sqrt(p.eps);
  const BubbleKernel& K = g->kernel();
  double inner = 0.0, outer = 0.0;
  for (int k = 0; k <= 200000; ++k) {
    const double r = 200.0 * k / 200000.0;
    if (r <= R)
      inner = std::max(inner, std::pow(1 + r * r, r_w / 2) * K.w0(r));
    else
      outer = std::max(outer, std::pow(p.eps, -r_w / 2) * K.w0(r));
  }
  CHECK(val == doctest::Approx(inner + outer).epsilon(0.01));

  SymFunction zero(g);
  CHECK(weighted_norm(zero, p) == 0.0);
  CHECK(weighted_norm(-3.0 * w, p) == doctest::Approx(3.0 * weighted_norm(w, p)).epsilon(1e-14));
  WeightedNormParams bad;
  bad.r_weight = 7.5;
  CHECK_THROWS_AS(bad.validate(N), ConcentraError);
}

TEST_CASE("Holder seminorm estimator") {
  const auto& g = grid7();
  WeightedNormParams p;
  ModeFunction c = ModeFunction::from_sym([&] {
    SymFunction f(g);
    f.add(0, g->ones());
    return f;
  }());
  CHECK(holder_seminorm_estimate(c, p) == doctest::Approx(0.0).scale(1.0));

  SymFunction w(g);
  w.add(0, g->w0());
  const ModeFunction W = ModeFunction::from_sym(w);
  const double est = holder_seminorm_estimate(W, p);
  // mean-value bound: sup_xi weight(xi) sup_{B(xi,1)} |w0'|
  const BubbleKernel& K = g->kernel();
  double bound = 0.0;
  for (double r = 0.0; r <= 200.0; r += 0.01) {
    double grad = 0.0;
    for (double s = std::max(0.0, r - 1.0); s <= r + 1.0; s += 0.01) grad = std::max(grad, std::abs(s * K.q(s)));
    bound = std::max(bound, norm_weight(r, p.r_weight, p) * grad);
  }
  CHECK(est > 0.0);
  CHECK(est <= bound);

  HolderSampling dense;
  dense.r_stride = 1;
  const double est4 = holder_seminorm_estimate(W, p, dense);
  CHECK(est4 == doctest::Approx(est).epsilon(0.05));
  HolderSampling finer = dense;
  finer.levels = 6;
  CHECK(holder_seminorm_estimate(W, p, finer) >= est4 - 1e-12);
}

TEST_CASE("kernel projections") {
  const auto& g = grid7();
  const int N = 7;
  const ConstantsTable& ct = bubble_constants(g->kernel());
  SymFunction z1(g);
  z1.add(xbar(0), g->q());
  const Eigen::VectorXd p1 = project_kernel(z1);
  CHECK(p1(1) == doctest::Approx(ct.C).epsilon(1e-6));
  for (int j = 0; j <= N; ++j)
    if (j != 1) CHECK(std::abs(p1(j)) < 1e-12 * ct.C);

  SymFunction w(g);
  w.add(0, g->w0());
  const Eigen::VectorXd pw = project_kernel(w);
  CHECK(pw(0) == doctest::Approx(-ct.B).epsilon(1e-5));
  for (int j = 1; j < N; ++j) CHECK(pw(j) == 0.0);

  // even in every xi_j
  SymFunction e(g);
  e.add_poly(Poly::variable(N, 2) * Poly::variable(N, 2), g->w0());
  const Eigen::VectorXd pe = project_kernel(e);
  for (int j = 1; j < N; ++j) CHECK(pe(j) == 0.0);
  CHECK(kernel_slot_name(0, N) == "Z0");
  CHECK(kernel_slot_name(N, N) == "Z");
}

TEST_CASE("precondition error names the offending slot") {
  const auto& g = grid7();
  const double p = g->kernel().dims().p;
  const ConstantsTable& ct = bubble_constants(g->kernel());
  // int w0^p Z0 = p int w0^p Z0 by parts (Neumann), so it vanishes and the solve goes through
  SymFunction wp(g);
  wp.add(0, g->w0().array().pow(p).matrix());
  CHECK(std::abs(project_kernel(wp)(0)) <= 1e-12 * ct.B);
  CHECK_NOTHROW(solve_linearized(wp, 1.0, 0.05));

  SymFunction w(g);
  w.add(0, g->w0());
  try {
    solve_linearized(w, 1.0, 0.05);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.slot() == "Z0");
    CHECK(e.projection() == doctest::Approx(-ct.B).epsilon(1e-5));
  }
}

TEST_CASE("manufactured solution") {
  const double eps = 0.05, a = 2.0;
  const Manufactured m = manufactured(eps, a);
  SolveDiagnostics d;
  SolverOptions so;
  so.compute_norms = true;
  const ModeFunction phi = solve_linearized(m.g, a, eps, so, &d);
  const auto& dirs = grid7()->directions();
  CHECK(max_diff(phi.sample(dirs), m.psi.sample(dirs)) <= 1e-6);
  CHECK(d.post_projection.head(7).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(d.ratio > 0.0);
}

TEST_CASE("zero, linearity, orthogonality and symmetry") {
  const auto& g = grid7();
  const int N = g->N();
  const double eps = 0.05, a = 1.0;
  LinearizedSolver solver(g, a, eps);
  SymFunction zero(g);
  CHECK(solver.solve(zero).max_abs_coefficient() == 0.0);

  const Manufactured m = manufactured(eps, a);
  // odd in xi_1, orthogonal to Z_1 after removing its projection
  SymFunction odd(g);
  Eigen::MatrixXd F = g->radial_nodal(std::vector<double>(g->nr(), 0.0));
  for (int i = 0; i < g->nr(); ++i) F.row(i).setConstant(std::pow(1.0 + g->r(i) * g->r(i), -3.0));
  odd.add_poly(Poly::variable(N, 0) * Poly::variable(N, 2) * Poly::variable(N, 2), F);
  {
    SymFunction z1(g);
    z1.add(xbar(0), g->q());
    odd -= (project_kernel(odd)(1) / project_kernel(z1)(1)) * z1;
  }
  SolveDiagnostics d;
  const ModeFunction u1 = solver.solve(m.g);
  const ModeFunction u2 = solver.solve(odd, &d);
  const ModeFunction u12 = solver.solve(2.0 * m.g + (-0.5) * odd);
  const auto& dirs = g->directions();
  const auto lhs = u12.sample(dirs);
  const auto rhs = (2.0 * u1 + (-0.5) * u2).sample(dirs);
  CHECK(max_diff(lhs, rhs) <= 1e-8);
  CHECK(d.post_projection.head(7).cwiseAbs().maxCoeff() <= 1e-8);

  // g odd in xi_1 gives phi odd in xi_1: every channel carries an odd xi_1 exponent
  for (const auto& [ch, v] : u2.channels())
    if (v.cwiseAbs().maxCoeff() > 0) CHECK(mono_exponent(ch, 0) % 2 == 1);

  // radial g gives radial phi
  SymFunction rad(g);
  rad.add(0, F);
  SymFunction z0(g);
  z0.add(0, g->z0());
  rad -= (project_kernel(rad)(0) / project_kernel(z0)(0)) * z0;
  const ModeFunction ur = solver.solve(rad);
  for (const auto& [ch, v] : ur.channels()) {
    if (ch != 0) CHECK(v.cwiseAbs().maxCoeff() == 0.0);
    if (ch == 0) CHECK(v.rightCols(v.cols() - 1).cwiseAbs().maxCoeff() <= 1e-12 * v.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("a-priori ratio over a small ensemble") {
  const auto ens = ratio_ensemble(grid7(), 1.0, {0.1, 0.01}, 4, 99);
  CHECK(ens.ratio.rows() == 4);
  CHECK(ens.min_ratio > 0.0);
  CHECK(std::isfinite(ens.max_ratio));
  const auto again = ratio_ensemble(grid7(), 1.0, {0.1, 0.01}, 4, 99);
  CHECK((ens.ratio - again.ratio).cwiseAbs().maxCoeff() == 0.0);
}
