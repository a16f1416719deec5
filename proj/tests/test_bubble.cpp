#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>
#include <cmath>
#include <random>

#include "concentra/bubble.hpp"
#include "concentra/constants.hpp"
#include "concentra/errors.hpp"
#include "concentra/quadrature.hpp"
#include "concentra/special.hpp"

using namespace concentra;

namespace {

Eigen::VectorXd random_point(int N, double radius, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = nd(rng);
  return radius * x / x.norm();
}

// closed-form w0 for the oracle side
double w0_closed(int N, double r) {
  const double a = std::pow(N * (N - 2.0), (N - 2.0) / 4.0);
  return a * std::pow(1.0 + r * r, -(N - 2.0) / 2.0);
}

}  // namespace

TEST_CASE("bubble closed forms") {
  const BubbleKernel& K = shared_kernel(7);
  const int N = 7;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(N);
  CHECK(K.eval_bubble(zero, 1.0) == doctest::Approx(std::pow(35.0, 1.25)).epsilon(1e-14));
  CHECK(K.dims().alpha_N == doctest::Approx(std::pow(35.0, 1.25)).epsilon(1e-14));

  Eigen::VectorXd far = Eigen::VectorXd::Zero(N);
  far(2) = 1e4;
  CHECK(K.eval_bubble(far, 1.0) * std::pow(1e4, N - 2.0) == doctest::Approx(K.dims().alpha_N).epsilon(1e-7));

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(N);
  e1(0) = 1.0;
  CHECK(K.eval_bubble(e1, 2.0) == doctest::Approx(std::pow(2.0, -2.5) * K.eval_bubble(0.5 * e1, 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(K.eval_bubble(e1, 0.0), ConcentraError);

  CHECK(K.eval_kernel(1, zero) == 0.0);
  CHECK(K.eval_kernel(0, zero) == doctest::Approx(2.5 * K.dims().alpha_N).epsilon(1e-14));

  std::mt19937 rng(11);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = random_point(N, 0.3 + t, rng);
    const double h = 1e-4;
    const double fd = (K.eval_bubble(x, 1.0 + h) - K.eval_bubble(x, 1.0 - h)) / (2 * h);
    CHECK(K.eval_kernel(0, x) == doctest::Approx(-fd).epsilon(1e-6).scale(1.0));
    CHECK(K.w0(x.norm()) == doctest::Approx(w0_closed(N, x.norm())).epsilon(1e-14));
  }
}

TEST_CASE("radial symmetry under rotations") {
  const BubbleKernel& K = shared_kernel(7);
  const int N = 7;
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXd M(N - 1, N - 1);
    for (int i = 0; i < N - 1; ++i)
      for (int j = 0; j < N - 1; ++j) M(i, j) = nd(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ();
    Eigen::VectorXd x = random_point(N, 1.7, rng), y = x;
    y.head(N - 1) = Q * x.head(N - 1);
    CHECK(K.eval_bubble(y, 1.0) == doctest::Approx(K.eval_bubble(x, 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("PDE and kernel residuals with closed-form derivatives") {
  const BubbleKernel& K = shared_kernel(7);
  const int N = 7;
  const double p = K.dims().p;
  std::mt19937 rng(3);
  double pde = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = random_point(N, 0.2 + 0.4 * t, rng);
    pde = std::max(pde, std::abs(K.eval_hess(x).trace() + std::pow(K.eval_bubble(x, 1.0), p)));
  }
  CHECK(pde <= 1e-10);

  // Z_0 = z0(r) and Z_1 = xi_1 q(r): radial Laplacians by a 9-point stencil in r
  const double h = 0.01;
  std::vector<double> off;
  for (int k = -4; k <= 4; ++k) off.push_back(k * h);
  const auto w = fd_weights(0.0, off, 2);
  double ker0 = 0.0, ker1 = 0.0;
  for (double r = 0.5; r < 12.0; r += 0.37) {
    double z1 = 0, z2 = 0, q1 = 0, q2 = 0;
    for (int k = 0; k < 9; ++k) {
      z1 += w[1][k] * K.z0(r + off[k]);
      z2 += w[2][k] * K.z0(r + off[k]);
      q1 += w[1][k] * K.q(r + off[k]);
      q2 += w[2][k] * K.q(r + off[k]);
    }
    const double pot = K.potential(r);
    ker0 = std::max(ker0, std::abs(z2 + (N - 1.0) / r * z1 + pot * K.z0(r)));
    // Delta(xi_1 q) = xi_1 (q'' + (N+1)/r q'), evaluated at xi_1 = 1
    ker1 = std::max(ker1, std::abs(q2 + (N + 1.0) / r * q1 + pot * K.q(r)));
  }
  CHECK(ker0 <= 1e-8);
  CHECK(ker1 <= 1e-8);

  // Neumann trace on xi_N = 0 for Z_0 and Z_j
  Eigen::VectorXd x = random_point(N, 1.3, rng);
  x(N - 1) = 0.0;
  for (int j = 0; j < N; ++j) {
    if (j == N - 1) continue;
    Eigen::VectorXd a = x, b = x;
    a(N - 1) = 1e-5;
    b(N - 1) = -1e-5;
    CHECK(std::abs(K.eval_kernel(j, a) - K.eval_kernel(j, b)) < 1e-12);
  }
}

TEST_CASE("eigenpair residual and refinement") {
  const BubbleKernel& K = shared_kernel(7);
  const auto& d = K.eigen_diagnostics();
  CHECK(K.lambda0() > 0.0);
  CHECK(d.residual_inf <= 1e-6);
  EigenOptions fine;
  fine.h = 0.005;
  const BubbleKernel K2(7, fine);
  CHECK(std::abs(K2.lambda0() - K.lambda0()) / K.lambda0() <= 1e-6);
}

TEST_CASE("half-space quadrature oracles") {
  const BubbleKernel& K = shared_kernel(7);
  const int N = 7;
  const ConstantsTable& ct = bubble_constants(K);
  // w0^2: alpha^2 |S^6|/2 * B(7/2, 3/2)/2
  const double a = K.dims().alpha_N;
  const double oracle = a * a * 0.5 * sphere_area(N) * 0.5 * std::tgamma(3.5) * std::tgamma(1.5) / std::tgamma(5.0);
  CHECK(ct.B == doctest::Approx(oracle).epsilon(1e-10));

  // Z_1 w0 (Z_1 alone is not integrable on R^7)
  RadialTerm z1;
  z1.mono = mono_make({1, 0, 0, 0, 0, 0, 0});
  z1.radial = [&](double r) { return K.q(r) * K.w0(r); };
  z1.decay = 2.0 * N - 3.0;
  CHECK(std::abs(quad_halfspace(N, {z1}).value) <= 1e-10);

  // xi_N |d_N w0|^2 - 2 xi_N |d_1 w0|^2
  RadialTerm t1, t2;
  t1.mono = mono_make({0, 0, 0, 0, 0, 0, 3});
  t1.radial = [&](double r) { return K.q(r) * K.q(r); };
  t1.decay = 2.0 * (N - 1.0) - 1.0;
  t2 = t1;
  t2.coef = -2.0;
  t2.mono = mono_make({2, 0, 0, 0, 0, 0, 1});
  const double diff = quad_halfspace(N, {t1, t2}).value;
  CHECK(std::abs(diff) <= 1e-8 * ct.A1_frak);
}

TEST_CASE("constants and identities") {
  for (int N : {7, 8}) {
    const BubbleKernel& K = shared_kernel(N);
    const ConstantsTable& ct = bubble_constants(K);
    const IdentityReport rep = verify_identities(K, 1e-6);
    CHECK(rep.checks.size() >= 6);
    for (const auto& c : rep.checks) {
      INFO(c.name, " residual ", c.residual);
      CHECK(c.pass);
    }
    CHECK(ct.A0_frak / ct.A1_frak == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(ct.D == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(ct.D_full == doctest::Approx(1.0).epsilon(1e-6));
    for (double v : {ct.A0_frak, ct.A1_frak, ct.B, ct.C0, ct.A, ct.C, ct.D, ct.lambda0, ct.lambda0_bar}) {
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
    const IdentityCheck* w0z0 = rep.find("int w0 Z0 = -int w0^2");
    REQUIRE(w0z0 != nullptr);
    CHECK(std::abs(w0z0->lhs + ct.B) <= 1e-6 * ct.B);
  }
  const ConstantsTable& c7 = bubble_constants(shared_kernel(7));
  const IdentityReport r7 = verify_identities(shared_kernel(7), 1e-6);
  CHECK(r7.find("int xi_N w0^{2N/(N-2)} = N(N-3)/(N-2) A1")->lhs / c7.A1_frak == doctest::Approx(28.0 / 5.0).epsilon(1e-6));
  CHECK(r7.find("int xi_N |grad w0|^2 = (N+1) A1")->lhs / c7.A1_frak == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("constants are stable under quadrature refinement") {
  const BubbleKernel& K = shared_kernel(7);
  QuadOptions loose;
  loose.rel_tol = 1e-10;
  QuadOptions tight;
  tight.rel_tol = 1e-12;
  tight.limit = 8000;
  const ConstantsTable a = compute_constants(K, loose), b = compute_constants(K, tight);
  for (auto [x, y] : {std::pair{a.A1_frak, b.A1_frak}, {a.B, b.B}, {a.C0, b.C0}, {a.A, b.A}, {a.C, b.C}, {a.D, b.D}})
    CHECK(std::abs(x - y) <= 1e-6 * std::abs(y));
}

TEST_CASE("dimension guard") { CHECK_THROWS_AS(BubbleKernel(6), ConcentraError); }
