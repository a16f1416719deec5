#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "concentra/errors.hpp"
#include "concentra/spectrum.hpp"

using namespace concentra;

namespace {

const ConstantsTable& CT7() { return bubble_constants(shared_kernel(7)); }

ReducedSpectrum leading() { return reduced_spectrum(perturbed_sphere(8, 0.1), CT7()); }

// sorted D (sigma m^2 - lambda0) with multiplicity, by brute force over m
std::vector<double> brute_eigenvalues(const ReducedSpectrum& s, double sigma, int J) {
  std::vector<double> v{s.D * (-s.lambda0)};
  for (int m = 1; static_cast<int>(v.size()) < 4 * J; ++m) {
    const double k = 2.0 * M_PI * m / s.L;
    v.push_back(s.D * (sigma * k * k - s.lambda0));
    v.push_back(v.back());
  }
  std::sort(v.begin(), v.end());
  v.resize(J);
  return v;
}

}  // namespace

TEST_CASE("quadratic forms on constant fields") {
  const CurvatureData cd = perturbed_sphere(8, 0.1, 64);
  const double eps = 0.2;
  const ReducedForms f = reduced_forms(cd, CT7(), eps);
  const int M = cd.size();
  const double L = cd.L;
  CHECK(f.P(Eigen::VectorXd::Constant(M, 0.7)) == doctest::Approx(0.5 * f.B * eps * L * 0.49).epsilon(1e-12));
  CHECK(f.R(Eigen::VectorXd::Constant(M, 0.7)) == doctest::Approx(-0.5 * f.D * f.lambda0 * L * 0.49).epsilon(1e-12));
  CHECK(f.R(Eigen::VectorXd::Constant(M, 0.7)) < 0.0);
  CHECK(!f.excluded.empty());

  const CurvatureData rs = round_sphere(8, 64);
  const ReducedForms g = reduced_forms(rs, CT7(), eps);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(M, 6);
  d.col(2).setConstant(1.5);
  CHECK(g.Q(d) == doctest::Approx(0.5 * g.C * eps * eps * L * (-1.0) * 2.25).epsilon(1e-12));

  // a single Fourier mode: P picks up (2 pi m / L)^2
  Eigen::VectorXd c(M);
  for (int v = 0; v < M; ++v) c(v) = std::cos(3.0 * cd.y(v));
  const double expect = 0.5 * f.A * eps * eps * 9.0 * M_PI + 0.5 * f.B * eps * M_PI;
  CHECK(f.P(c) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("leading eigenvalues") {
  const ReducedSpectrum s = leading();
  CHECK(s.D == doctest::Approx(0.5).epsilon(1e-6));
  for (double sigma : {1e-2, 1e-3, 2.5e-4}) {
    const Eigen::VectorXd ev = s.eigenvalues(sigma, 40);
    const auto ref = brute_eigenvalues(s, sigma, 40);
    for (int j = 0; j < 40; ++j) CHECK(ev(j) == doctest::Approx(ref[j]).epsilon(1e-14));
  }
  // eps -> 0 at fixed m
  CHECK(s.eigenvalue(5, 1e-14) == doctest::Approx(-s.D * s.lambda0).epsilon(1e-10));
  // L = 2 pi: mode m crosses at eps = sqrt(lambda0) / m
  for (int m : {1, 4, 30}) {
    const double e = std::sqrt(s.lambda0) / m;
    CHECK(std::abs(s.eigenvalue(m, e * e)) <= 1e-12);
    CHECK(s.crossing(m) == doctest::Approx(e * e).epsilon(1e-14));
  }
  // strictly increasing in sigma, mode by mode
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(1e-5, 1e-2);
  for (int t = 0; t < 50; ++t) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const Eigen::VectorXd la = s.eigenvalues(a, 20), lb = s.eigenvalues(b, 20);
    for (int j = 1; j < 20; ++j) CHECK(la(j) < lb(j));
  }
  const ReducedForms f = reduced_forms(perturbed_sphere(8, 0.1), CT7(), 0.05);
  CHECK((reduced_eigenvalues(f, 0.05, 10) - s.eigenvalues(0.0025, 10)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("eigenvalue curves are Lipschitz in sigma") {
  const ReducedSpectrum s = leading();
  const int J = 40;
  // sorted curves move no faster than the steepest mode among the first J
  const double slope = s.D * s.wavenumber2(J);
  const double a = 1.0 / 8192, b = 1.0 / 64;
  const int n = 2000;
  Eigen::VectorXd prev = s.eigenvalues(a, J);
  for (int k = 1; k <= n; ++k) {
    const double sig = a + (b - a) * k / n;
    const Eigen::VectorXd cur = s.eigenvalues(sig, J);
    CHECK((cur - prev).cwiseAbs().maxCoeff() <= slope * (b - a) / n * (1 + 1e-12));
    prev = cur;
  }
}

TEST_CASE("Weyl counting") {
  CHECK(weyl_count(0.01, 1.0, 2.0 * M_PI) == 21);
  CHECK(weyl_count(1e6, 1.0, 2.0 * M_PI) == 1);
  std::vector<double> scaled;
  for (double sigma : {1e-2, 1e-3, 1e-4, 1e-5}) scaled.push_back(weyl_count(sigma, 1.0, 2.0 * M_PI) * std::sqrt(sigma));
  for (double v : scaled) CHECK(v == doctest::Approx(scaled.back()).epsilon(0.1));
  CHECK(scaled.back() == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("gap search per level") {
  const ReducedSpectrum s = leading();
  for (int l : {6, 9, 12}) {
    const GapResult g = find_gap_epsilon(s, l, 0.1);
    CHECK(g.sigma_l > g.sigma_lo);
    CHECK(g.sigma_l < g.sigma_hi);
    CHECK(g.eps_l == doctest::Approx(std::sqrt(g.sigma_l)));
    // every crossing is lambda0 / m^2 and no crossing lies inside the gap
    for (const auto& c : g.crossings) {
      CHECK(c.sigma == doctest::Approx(s.lambda0 / (double(c.mode) * c.mode)).epsilon(1e-10));
      CHECK(c.multiplicity == 2);
      CHECK((c.sigma <= g.gap_lo + 1e-15 || c.sigma >= g.gap_hi - 1e-15));
    }
    // certified gap from an independent scan of every mode
    double gap = s.D * s.lambda0;
    for (int m = 0; m <= s.max_mode(g.sigma_lo) + 1; ++m) gap = std::min(gap, std::abs(s.eigenvalue(m, g.sigma_l)));
    CHECK(g.certified_gap == doctest::Approx(gap).epsilon(1e-12));
    CHECK(g.c_observed == doctest::Approx(gap / g.eps_l).epsilon(1e-12));
    CHECK(g.meets_target);
  }
  try {
    // about 2000 crossing modes against a 16-point grid
    find_gap_epsilon(s, 20, 0.1, 16);
    FAIL("a 16-point grid cannot resolve level 20");
  } catch (const ConcentraError& e) {
    CHECK(e.kind() == ErrorKind::Resolution);
  }
  CHECK_THROWS_AS(find_gap_epsilon(s, 6, 0.1, 4), ConcentraError);
}

TEST_CASE("gap suite over levels 6..12") {
  const ReducedSpectrum s = leading();
  const GapSuite g = gap_suite(s, 6, 12, 0.1);
  CHECK(g.levels.size() == 7);
  CHECK(g.counts_ok);
  CHECK(g.widths_ok);
  CHECK(g.margins_ok);
  CHECK(g.dep2_ok);
  for (std::size_t i = 0; i < g.levels.size(); ++i) CHECK(g.levels[i].crossing_count <= g.weyl_bound[i]);
}

TEST_CASE("dep2 sandwich") {
  const ReducedSpectrum s = leading();
  for (int l : {6, 10}) {
    const Dep2Report r = dep2_check(s, l);
    CHECK(r.pass);
    CHECK(r.violations == 0);
    CHECK(r.gamma_minus > 0.0);
    CHECK(r.gamma_plus >= r.gamma_minus);
    CHECK(r.pairs > 0);
  }
}

TEST_CASE("Courant-Fischer consistency") {
  const ReducedSpectrum s = leading();
  const CourantFischerReport r = courant_fischer_check(s, 0.05, 128, 40, 8);
  CHECK(r.dimension == 40);
  CHECK(r.max_violation <= 1e-10);
  CHECK(r.max_agreement <= 1e-8);
  CHECK(r.pass);
}

TEST_CASE("kernel decomposition") {
  const auto grid = HalfspaceGrid::make(7);
  const int M = 3;
  const auto Z = kernel_functions(grid);
  REQUIRE(Z.size() == 8);
  const Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(M, 1.5, 2.5);

  // (delta0 / mu) Z_0 recovers delta0
  std::vector<SymFunction> phi;
  for (int v = 0; v < M; ++v) phi.push_back((0.3 / mu(v)) * Z[0]);
  const Decomposition a = decompose(phi, mu);
  for (int v = 0; v < M; ++v) {
    CHECK(a.delta(v) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(std::abs(a.e(v)) <= 1e-10);
    CHECK(a.d.row(v).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // an orthogonal remainder has no kernel part
  SymFunction perp(grid);
  perp.add_poly(Poly::variable(7, 0) * Poly::variable(7, 1), grid->w0());
  const Decomposition b = decompose(std::vector<SymFunction>(M, perp), mu);
  CHECK(b.delta.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(b.e.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(b.d.cwiseAbs().maxCoeff() <= 1e-8);

  // a mixture: round trip and linearity
  std::vector<SymFunction> mix, twice;
  for (int v = 0; v < M; ++v) {
    SymFunction f = perp + (0.2 * v) * Z[0] + (-0.4) * Z[2] + 0.7 * Z[7];
    f.add(0, grid->w0(), 0.01 * (v + 1));
    twice.push_back(2.0 * f);
    mix.push_back(std::move(f));
  }
  const Decomposition c = decompose(mix, mu);
  CHECK(c.max_orthogonality <= 1e-8);
  const auto back = reconstruct(c, mu);
  for (int v = 0; v < M; ++v) CHECK((back[v] - mix[v]).max_abs() <= 1e-8 * mix[v].max_abs());
  const Decomposition c2 = decompose(twice, mu);
  CHECK((c2.delta - 2.0 * c.delta).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((c2.d - 2.0 * c.d).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((c2.e - 2.0 * c.e).cwiseAbs().maxCoeff() <= 1e-10);
}
