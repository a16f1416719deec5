#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "concentra/errors.hpp"
#include "concentra/geometry.hpp"
#include "concentra/jacobi.hpp"
#include "concentra/metric_jet.hpp"

using namespace concentra;

namespace {

Eigen::MatrixXd smooth_section(const CurvatureData& cd, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(cd.size(), cd.N - 1);
  for (int m = 0; m < cd.N - 1; ++m)
    for (int f = 0; f < 5; ++f) {
      const double a = nd(rng) / (1 + f * f), b = nd(rng) / (1 + f * f);
      for (int v = 0; v < cd.size(); ++v) {
        const double t = 2 * M_PI * f * cd.y(v) / cd.L;
        s(v, m) += a * std::cos(t) + b * std::sin(t);
      }
    }
  return s;
}

Eigen::VectorXd random_point(int N, double radius, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = nd(rng);
  x(N - 1) = std::abs(x(N - 1));
  return radius * x / x.norm();
}

FourierEntry entry(std::vector<int> idx, double c) {
  FourierEntry e;
  e.index = std::move(idx);
  e.constant = c;
  return e;
}

}  // namespace

TEST_CASE("builtin geometries: minimality and hbar") {
  auto sphere = round_sphere(8);
  CHECK(sphere.N == 7);
  CHECK(minimality_residual(sphere) == 0.0);
  for (int v = 0; v < sphere.size(); ++v) {
    CHECK(hbar(sphere, v) == 8.0);
    CHECK(hbar_trace_form(sphere, v) == doctest::Approx(8.0).epsilon(1e-15));
  }
  CHECK(hbar_positive(sphere));

  auto sph = spheroid_equator(8, 2.0);
  CHECK(minimality_residual(sph) <= 1e-12);
  CHECK(hbar(sph, 3) == doctest::Approx(2.0 + 6.0 / 4.0));

  auto flat = flat_geometry(8);
  CHECK(hbar(flat, 0) == 0.0);
  CHECK_FALSE(hbar_positive(flat));

  auto pert = perturbed_sphere(8, 0.1);
  CHECK(minimality_residual(pert) <= 1e-10);
  CHECK(hbar_positive(pert));
}

TEST_CASE("synthetic geometry validation") {
  SyntheticSpec spec;
  spec.n = 8;
  spec.grid = 32;
  spec.H.push_back(entry({0, 0}, 2.0));
  for (int i = 1; i < 7; ++i) spec.H.push_back(entry({i, i}, 1.0));
  auto cd = synthetic_geometry(spec);
  CHECK(hbar(cd, 5) == doctest::Approx(7 + 3));

  SyntheticSpec bad = spec;
  bad.R.push_back(entry({1, 1, 2, 3}, 0.5));
  CHECK_THROWS_AS(synthetic_geometry(bad), ConcentraError);

  SyntheticSpec conflict = spec;
  conflict.R.push_back(entry({1, 2, 1, 2}, 0.5));
  conflict.R.push_back(entry({2, 1, 1, 2}, 0.5));
  CHECK_THROWS_AS(synthetic_geometry(conflict), ConcentraError);

  SyntheticSpec gam = spec;
  gam.Gamma.push_back(entry({1}, 0.3));
  CHECK(minimality_residual(synthetic_geometry(gam)) == doctest::Approx(0.3));
}

TEST_CASE("metric jet") {
  std::mt19937 rng(7);
  SUBCASE("flat data gives the block metric") {
    auto jet = metric_jet(flat_geometry(8), 0);
    for (int i = 0; i <= jet.N; ++i)
      for (int j = 0; j <= jet.N; ++j) {
        const auto& p = jet.metric[i][j];
        CHECK(p.degree() <= 0);
        CHECK(p.coefficient(0) == (i == j ? 1.0 : 0.0));
      }
    CHECK(jet.sqrt_det.degree() == 0);
    CHECK(jet.sqrt_det.coefficient(0) == 1.0);
  }
  SUBCASE("round sphere first-order determinant coefficient") {
    auto jet = metric_jet(round_sphere(8), 0);
    std::vector<int> e(jet.nvars(), 0);
    e[jet.xn_var()] = 1;
    e[jet.eps_var()] = 1;
    CHECK(jet.sqrt_det.coefficient(mono_make(e)) == doctest::Approx(-7.0));
  }
  for (auto cd : {round_sphere(8), perturbed_sphere(8, 0.1), spheroid_equator(9, 1.5)}) {
    auto jet = metric_jet(cd, 5);
    const int N = jet.N;
    // inverse times metric is the identity through second order
    auto prod = poly_matmul(jet.inverse, jet.metric, jet.eps_var(), 2);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) {
        Poly d = prod[i][j] - Poly::constant(jet.nvars(), i == j ? 1.0 : 0.0);
        CHECK(d.max_abs_coefficient() <= 1e-12);
      }
    for (int trial = 0; trial < 20; ++trial) {
      const double eps = 0.01;
      const auto X = random_point(N, 0.1, rng);
      const double bound = 50.0 * std::pow(eps * 0.1, 3);
      const auto g = jet.eval_metric(X, eps);
      const double sd = jet.eval(jet.sqrt_det, X, eps);
      CHECK(std::abs(g.determinant() - sd * sd) <= bound);
      CHECK(std::abs(jet.eval(jet.log_det, X, eps) - 2.0 * std::log(sd)) <= bound);
      CHECK((g * jet.eval_inverse(X, eps) - Eigen::MatrixXd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff() <= bound);
      CHECK(std::abs(jet.eval(jet.log_det, X, eps) - jet.eval(jet.log_det_printed, X, eps)) <= bound);
    }
    // the closed form differs only in its X_N^2 coefficient, by tr(H^2)/2
    Poly diff = jet.sqrt_det - jet.sqrt_det_printed;
    std::vector<int> e(jet.nvars(), 0);
    e[jet.xn_var()] = 2;
    e[jet.eps_var()] = 2;
    const double expect = 0.5 * cd.H2(5).trace();
    CHECK(diff.coefficient(mono_make(e)) == doctest::Approx(expect));
    CHECK(std::abs(diff.max_abs_coefficient() - std::abs(expect)) <= 1e-12);
  }
}

TEST_CASE("Jacobi operator") {
  std::mt19937 rng(11);
  auto sphere = round_sphere(8, 64);
  JacobiOperator J(sphere);
  SUBCASE("constant section on the sphere") {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(64, 6);
    phi.col(2).setOnes();
    CHECK((J.apply(phi) + phi).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("flat periodic Laplacian") {
    auto flat = flat_geometry(8, 3.0, 64);
    JacobiOperator Jf(flat);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(64, 6);
    for (int v = 0; v < 64; ++v) phi(v, 0) = std::cos(2 * M_PI * 3 * flat.y(v) / 3.0);
    const double k = 2 * M_PI * 3 / 3.0;
    CHECK((Jf.apply(phi) - k * k * phi).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("linearity and symmetry") {
    auto pert = perturbed_sphere(8, 0.1, 64);
    JacobiOperator Jp(pert);
    auto a = smooth_section(pert, rng), b = smooth_section(pert, rng);
    const double s = 0.7, t = -1.3;
    CHECK((Jp.apply(s * a + t * b) - s * Jp.apply(a) - t * Jp.apply(b)).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK(std::abs(jacobi_inner(pert, Jp.apply(a), b) - jacobi_inner(pert, a, Jp.apply(b))) <= 1e-10);
  }
  SUBCASE("round sphere is degenerate with a first-mode kernel") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Ones(64, 6);
    try {
      J.solve(g);
      FAIL("expected degeneracy");
    } catch (const DegeneracyError& e) {
      const auto& K = e.near_kernel();
      CHECK(K.cols() == 12);
      // each kernel vector lies in span{cos y e_m, sin y e_m}
      Eigen::MatrixXd basis(64 * 6, 12);
      basis.setZero();
      for (int m = 0; m < 6; ++m)
        for (int v = 0; v < 64; ++v) {
          basis(v * 6 + m, 2 * m) = std::cos(sphere.y(v));
          basis(v * 6 + m, 2 * m + 1) = std::sin(sphere.y(v));
        }
      Eigen::MatrixXd q = basis.householderQr().householderQ() * Eigen::MatrixXd::Identity(64 * 6, 12);
      CHECK((K - q * (q.transpose() * K)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("positive potential") {
    SyntheticSpec spec;
    spec.grid = 64;
    for (int m = 1; m < 7; ++m) spec.R.push_back(entry({m, 0, 0, m}, 1.0));
    auto cd = synthetic_geometry(spec);
    JacobiOperator Js(cd);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(64, 6);
    for (int v = 0; v < 64; ++v) g(v, 0) = std::cos(cd.y(v));
    CHECK((Js.solve(g) - 0.5 * g).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("perturbation restores invertibility") {
    auto pert = perturbed_sphere(8, 0.1, 128);
    JacobiOperator Jp(pert);
    CHECK(Jp.sigma_ratio() >= 1e-8);
    auto g = smooth_section(pert, rng);
    auto phi = Jp.solve(g);
    CHECK((Jp.apply(phi) - g).cwiseAbs().maxCoeff() <= 1e-8);
  }
}
