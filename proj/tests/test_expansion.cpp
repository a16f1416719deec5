#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "concentra/errors.hpp"
#include "concentra/expansion.hpp"
#include "concentra/special.hpp"

using namespace concentra;

namespace {

const BubbleKernel& K7() { return shared_kernel(7); }
const ConstantsTable& CT7() { return bubble_constants(K7()); }

ExpansionOptions small_opts(int order = 1) {
  ExpansionOptions o;
  o.order = order;
  o.y_nodes = 4;
  return o;
}

double beta_B(int N) {
  // int_{R^N_+} w0^2 by the Beta function
  const double a = std::pow(N * (N - 2.0), (N - 2.0) / 4.0);
  const double half = 0.5 * std::tgamma(N / 2.0) * std::tgamma(N / 2.0 - 2.0) / std::tgamma(N - 2.0);
  return a * a * 0.5 * sphere_area(N) * half;
}

// shared across cases: order-1 build on the perturbed sphere at eps = 0.1
const ExpansionState& built() {
  static const ExpansionState s = build_expansion(perturbed_sphere(8, 0.1), CT7(), 0.1, small_opts());
  return s;
}

}  // namespace

TEST_CASE("mu0 field") {
  const ConstantsTable& ct = CT7();
  CHECK(ct.B == doctest::Approx(beta_B(7)).epsilon(1e-10));
  const Eigen::VectorXd m = mu0_field(round_sphere(8), ct);
  for (int i = 0; i < m.size(); ++i) CHECK(m(i) == doctest::Approx(ct.A1_frak * 8.0 / beta_B(7)).epsilon(1e-10));

  try {
    mu0_field(flat_geometry(8), ct);
    FAIL("flat data must fail positivity");
  } catch (const PositivityError& e) {
    CHECK(e.kind() == ErrorKind::Positivity);
  }

  SyntheticSpec spec;
  spec.R_from_gauss = true;
  spec.grid = 32;
  for (int i = 0; i < 7; ++i) spec.H.push_back({{i, i}, i == 0 ? 2.0 : 1.0, {}, {}});
  const Eigen::VectorXd md = mu0_field(synthetic_geometry(spec), ct);
  CHECK((md.array() - ct.A1_frak * 10.0 / ct.B).abs().maxCoeff() <= 1e-12 * md(0));

  const Eigen::VectorXd mp = mu0_field(perturbed_sphere(8, 0.1), ct);
  CHECK(mp.minCoeff() > 0.0);
}

TEST_CASE("g1 kernel projections") {
  const ConstantsTable& ct = CT7();
  const CurvatureData cd = perturbed_sphere(8, 0.1, 16);
  const Eigen::VectorXd mu0 = mu0_field(cd, ct);
  for (int node = 0; node < cd.size(); node += 3) {
    const Eigen::VectorXd p = g1_projection(cd.H[node], mu0(node), K7());
    CHECK(std::abs(p(0)) <= 1e-6 * ct.B * mu0(node) * mu0(node));
    for (int l = 1; l < 7; ++l) CHECK(std::abs(p(l)) <= 1e-10);
  }
  // H = 0 with mu0 = 1: only the -mu0^2 w0 term survives
  const auto grid = HalfspaceGrid::make(7);
  SymFunction g = g1_sym(grid, Eigen::MatrixXd::Zero(7, 7), 1.0);
  SymFunction w(grid);
  w.add(0, grid->w0());
  CHECK((g + w).max_abs() <= 1e-14 * w.max_abs());
}

TEST_CASE("first layer") {
  const ConstantsTable& ct = CT7();
  const CurvatureData cd = perturbed_sphere(8, 0.1);
  const ExpansionState a = solve_order1(cd, ct, 0.1, small_opts(0));
  const ExpansionState b = solve_order1(cd, ct, 0.05, small_opts(0));
  const double ratio = layer_norm(b, 1, 3.0) / layer_norm(a, 1, 3.0);
  CHECK(ratio >= 0.4);
  CHECK(ratio <= 0.6);
  for (int node = 0; node < a.nodes(); ++node) CHECK(project_kernel(a.w[0][node]).head(7).cwiseAbs().maxCoeff() <= 1e-8);

  // y-independent data gives a y-independent layer
  const ExpansionState r = solve_order1(round_sphere(8), ct, 0.1, small_opts(0));
  const auto& dirs = r.grid->directions();
  const auto ref = r.w[0][0].sample(dirs);
  for (int node = 1; node < r.nodes(); ++node) {
    const auto v = r.w[0][node].sample(dirs);
    double d = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) d = std::max(d, std::abs(v[k] - ref[k]));
    CHECK(d <= 1e-10);
  }
}

TEST_CASE("degenerate geometry stops the build") {
  try {
    build_expansion(round_sphere(8), CT7(), 0.1, small_opts());
    FAIL("round sphere must be degenerate");
  } catch (const DegeneracyError& e) {
    CHECK(e.kind() == ErrorKind::Degeneracy);
  }
}

TEST_CASE("curvature cancellation and the mixed integral") {
  const CancellationReport rep = curvature_cancellation(K7(), 20, 17);
  CHECK(rep.samples == 20);
  CHECK(rep.max_term > 1.0);
  CHECK(rep.max_residual <= 1e-8);
  CHECK(rep.mixed_integral == doctest::Approx(-0.5 * rep.C0).epsilon(1e-8));
  CHECK(rep.C0 == doctest::Approx(CT7().C0).epsilon(1e-8));
}

TEST_CASE("order-1 build") {
  const ExpansionState& s = built();
  REQUIRE(s.w.size() == 2);
  REQUIRE(s.mu.size() == 2);
  REQUIRE(s.phi.size() == 1);
  const double mu0 = s.mu[0].maxCoeff();
  for (const auto& st : s.stages) {
    INFO("stage ", st.stage);
    if (st.stage == 0) {
      // eps g1 carries no free parameter; its Z0 slot is zero up to grid quadrature error
      CHECK(st.final_z0 <= 1e-5 * s.eps * s.B * mu0 * mu0);
    } else {
      CHECK(st.final_z0 <= 1e-8);
    }
    CHECK(st.final_zl <= 1e-8);
  }
  CHECK(s.mu_total().minCoeff() > 0.0);
  for (int node = 0; node < s.nodes(); ++node) CHECK(project_kernel(s.w[1][node]).head(7).cwiseAbs().maxCoeff() <= 1e-8);

  // re-projection of the stage-1 remainder after the choice of mu_1 and Phi_1
  const Eigen::MatrixXd P = stage_projections(s, 1);
  CHECK(P.leftCols(7).cwiseAbs().maxCoeff() <= 1e-8);

  // the same build twice is bitwise identical
  const ExpansionState again = build_expansion(perturbed_sphere(8, 0.1), CT7(), 0.1, small_opts());
  CHECK((again.mu[1] - s.mu[1]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((again.phi[0] - s.phi[0]).cwiseAbs().maxCoeff() == 0.0);

  // order 0 reproduces solve_order1
  const ExpansionState z = build_expansion(perturbed_sphere(8, 0.1), CT7(), 0.1, small_opts(0));
  const ExpansionState o = solve_order1(perturbed_sphere(8, 0.1), CT7(), 0.1, small_opts(0));
  REQUIRE(z.w.size() == 1);
  CHECK(layer_norm(z, 1, 3.0) == doctest::Approx(layer_norm(o, 1, 3.0)).epsilon(1e-14));
}

TEST_CASE("corrected mu approaches mu0") {
  const ExpansionState b = build_expansion(perturbed_sphere(8, 0.1), CT7(), 0.05, small_opts());
  const double da = (built().mu_total() - built().mu[0]).cwiseAbs().maxCoeff();
  const double db = (b.mu_total() - b.mu[0]).cwiseAbs().maxCoeff();
  CHECK(da > 0.0);
  CHECK(db < da);
}

TEST_CASE("residual without layers is first order") {
  ResidualOptions ro;
  ro.include_layers = false;
  const CurvatureData cd = perturbed_sphere(8, 0.1);
  const ExpansionState a = init_expansion(cd, CT7(), 0.1, small_opts());
  const ExpansionState b = init_expansion(cd, CT7(), 0.05, small_opts());
  const double ra = residual(a, ro).norm, rb = residual(b, ro).norm;
  const double slope = std::log(ra / rb) / std::log(2.0);
  MESSAGE("no-layer residual slope ", slope);
  CHECK(slope >= 0.8);
  CHECK(slope <= 1.5);
  CHECK(!residual(a, ro).truncation.empty());
}

TEST_CASE("global approximation cutoff") {
  auto state = std::make_shared<const ExpansionState>(built());
  const GlobalApproximation G = assemble_global(state, 0.75);
  const double eps = state->eps;
  CHECK(G.inner_radius() == doctest::Approx(2.0 * std::pow(eps, -0.75)));
  CHECK(G.chi(0.0) == 1.0);
  CHECK(G.chi(G.inner_radius()) == 1.0);
  CHECK(G.chi(G.outer_radius()) == 0.0);
  CHECK(G.chi(G.outer_radius() + 1.0) == 0.0);
  double prev = 1.0;
  for (double r = G.inner_radius(); r <= G.outer_radius(); r += 0.01) {
    CHECK(G.chi(r) <= prev + 1e-15);
    prev = G.chi(r);
  }
  CHECK(G.chi_derivative_constant() > 0.0);
  CHECK(G.chi_derivative_constant() < 10.0);

  Eigen::VectorXd X = Eigen::VectorXd::Zero(7);
  X(6) = G.outer_radius() + 1.0;
  CHECK(G.eval(0.3, X) == 0.0);
  // inside the plateau V is the rescaled inner profile
  X(6) = 1.5;
  Eigen::VectorXd d = X;
  d.head(6) -= G.phi_at(0.3);
  const double mu = G.mu_at(0.3);
  CHECK(G.eval(0.3, X) == doctest::Approx(std::pow(mu, -2.5) * G.eval_inner(0.3, d / mu)).epsilon(1e-14));
  CHECK_THROWS_AS(assemble_global(state, 0.4), ConcentraError);
  CHECK_THROWS_AS(assemble_global(state, 1.0), ConcentraError);
}

TEST_CASE("exponent fit") {
  const std::vector<double> eps{0.1, 0.05, 0.025};
  std::vector<double> v;
  for (double e : eps) v.push_back(3.0 * std::pow(e, 1.5));
  CHECK(fit_exponent(eps, v) == doctest::Approx(1.5).epsilon(1e-12));
}
