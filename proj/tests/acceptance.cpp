// One PASS/FAIL line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "concentra/constants.hpp"
#include "concentra/errors.hpp"
#include "concentra/expansion.hpp"
#include "concentra/geometry.hpp"
#include "concentra/halfspace_solver.hpp"
#include "concentra/jacobi.hpp"
#include "concentra/spectrum.hpp"

using namespace concentra;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int id, bool pass, const std::string& summary) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void detail(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  std::printf("    ");
  std::printf(fmt, a, b, c, d);
  std::printf("\n");
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

template <class F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, false, std::string("unexpected error: ") + e.what());
  }
}

void identities() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst = 0.0;
  for (int N : {7, 8}) {
    const IdentityReport rep = verify_identities(shared_kernel(N), 1e-6);
    ok = ok && rep.checks.size() >= 6 && rep.all_pass();
    for (const auto& c : rep.checks) worst = std::max(worst, c.residual);
  }
  const double t = seconds_since(t0);
  verdict(1, ok && t < 30.0, fmt("max relative residual %.2e (tol 1e-6), %.1f s (limit 30 s)", worst, t));
}

void eigenpair() {
  const BubbleKernel& K = shared_kernel(7);
  EigenOptions fine;
  fine.h = 0.5 * K.eigen_diagnostics().h;
  const BubbleKernel K2(7, fine);
  const double drift = std::abs(K2.lambda0() - K.lambda0()) / K.lambda0();
  const double res = K.eigen_diagnostics().residual_inf;
  verdict(2, K.lambda0() > 0.0 && drift <= 1e-6 && res <= 1e-6,
          fmt("lambda0 %.8f, drift under halving %.2e (tol 1e-6), residual %.2e (tol 1e-6)", K.lambda0(), drift, res));
}

void projections() {
  const BubbleKernel& K = shared_kernel(7);
  const CurvatureData cd = perturbed_sphere(8, 0.1);
  const Eigen::VectorXd mu0 = mu0_field(cd, bubble_constants(K));
  double z0 = 0.0, zl = 0.0;
  for (int v = 0; v < cd.size(); ++v) {
    const Eigen::VectorXd p = g1_projection(cd.H[v], mu0(v), K);
    z0 = std::max(z0, std::abs(p(0)));
    zl = std::max(zl, p.tail(p.size() - 1).cwiseAbs().maxCoeff());
  }
  const CancellationReport c = curvature_cancellation(K, 50, 20240601);
  verdict(3, z0 <= 1e-6 && zl <= 1e-10 && c.samples == 50 && c.max_residual <= 1e-8,
          fmt("max |int g1 Z0| %.2e (tol 1e-6), max |int g1 Z_l| %.2e (tol 1e-10), cancellation %.2e over 50 "
              "tensors (tol 1e-8)",
              z0, zl, c.max_residual));
}

void layer_scaling() {
  const auto t0 = Clock::now();
  ExpansionOptions opts;
  opts.order = 1;
  ResidualOptions ropts;
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  const SweepReport rep = expansion_sweep(perturbed_sphere(8, 0.1), bubble_constants(shared_kernel(7)), eps, opts, ropts);
  const double t = seconds_since(t0);
  for (const auto& row : rep.rows)
    detail("eps %.4f  ||w1|| %.4e  ||w2|| %.4e  residual %.4e", row.eps, row.w_norms[0], row.w_norms[1], row.residual);
  const double f1 = rep.w_exponents[0], f2 = rep.w_exponents[1];
  const double slope_min = 1.0 + 2.0 / 2.0 - 0.3;
  const bool ok = std::abs(f1 - 1.0) <= 0.3 && std::abs(f2 - 1.5) <= 0.3 && rep.residual_exponent >= slope_min && t < 600.0;
  verdict(4, ok,
          fmt("w1 exponent %.3f (1 +- 0.3), w2 exponent %.3f (1.5 +- 0.3), residual slope %.3f (>= 1.7), %.0f s", f1,
              f2, rep.residual_exponent, t));
}

void solver_ratio() {
  const auto grid = HalfspaceGrid::make(7);
  const std::vector<double> eps{0.1, 0.03, 0.01, 0.003};
  const RatioEnsemble ens = ratio_ensemble(grid, 1.0, eps, 20, 20240601, 4.0);
  const Eigen::RowVectorXd sup = ens.ratio.colwise().maxCoeff();
  for (std::size_t k = 0; k < eps.size(); ++k)
    detail("eps %.4f  sup ratio %.4f  min ratio %.4f", eps[k], sup(k), ens.ratio.col(k).minCoeff());
  const double band = sup.maxCoeff() / sup.minCoeff();
  verdict(5, band < 3.0, fmt("sup-over-ensemble ratio spans a factor %.3f across eps (limit 3)", band));
}

void degeneracy() {
  const int N = 7, n = N - 1;
  const CurvatureData rs = round_sphere(8);
  const int M = rs.size();
  bool raised = false, kernel_ok = false;
  int dim = 0;
  double off_mode = 0.0;
  try {
    JacobiOperator(rs).solve(Eigen::MatrixXd::Zero(M, n));
  } catch (const DegeneracyError& e) {
    raised = true;
    const Eigen::MatrixXd& V = e.near_kernel();
    dim = static_cast<int>(V.cols());
    // project each column off span{cos y, sin y} e_m
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(M * n, 2 * n);
    for (int v = 0; v < M; ++v)
      for (int m = 0; m < n; ++m) {
        basis(v * n + m, 2 * m) = std::cos(rs.y(v));
        basis(v * n + m, 2 * m + 1) = std::sin(rs.y(v));
      }
    const Eigen::MatrixXd Q = basis.householderQr().householderQ() * Eigen::MatrixXd::Identity(M * n, 2 * n);
    for (int c = 0; c < dim; ++c) {
      const Eigen::VectorXd col = V.col(c) / V.col(c).norm();
      off_mode = std::max(off_mode, (col - Q * (Q.transpose() * col)).norm());
    }
    kernel_ok = dim == 2 * n && off_mode <= 1e-8;
  }

  const CurvatureData pd = perturbed_sphere(8, 0.1);
  const JacobiOperator J(pd);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd rhs(pd.size(), n);
  for (int v = 0; v < rhs.rows(); ++v)
    for (int m = 0; m < n; ++m) rhs(v, m) = nd(rng);
  const Eigen::MatrixXd x = J.solve(rhs);
  const double res = (J.apply(x) - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
  verdict(6, raised && kernel_ok && res <= 1e-8,
          fmt("round sphere near-kernel dimension %.0f (expect 12), off first-mode part %.2e; perturbed solve residual "
              "%.2e (tol 1e-8)",
              dim, off_mode, res));
}

void gaps() {
  const auto t0 = Clock::now();
  const ReducedSpectrum s = reduced_spectrum(perturbed_sphere(8, 0.1), bubble_constants(shared_kernel(7)));
  const GapSuite g = gap_suite(s, 6, 12, 0.1);
  for (std::size_t i = 0; i < g.levels.size(); ++i) {
    const GapResult& r = g.levels[i];
    detail("l %.0f  crossings %.0f (Weyl bound %.0f)  c_l %.4f", r.level, r.crossing_count, g.weyl_bound[i],
           r.c_observed);
  }
  double gmin = INFINITY;
  for (const auto& d : g.dep2) gmin = std::min(gmin, d.gamma_minus);
  const double t = seconds_since(t0);
  detail("smallest fitted gamma- %.4f", gmin);
  verdict(7, g.pass() && t < 120.0,
          std::string("(a) counts ") + (g.counts_ok ? "ok" : "bad") +
              fmt(", (b) width constant %.3f spread %.2f, (c) c_min %.3f spread %.2f", g.width_constant,
                  g.width_spread, g.c_min, g.c_spread) +
              ", (d) dep2 " + (g.dep2_ok ? "ok" : "bad") + fmt(", %.2f s (limit 120 s)", t));
}

void positivity() {
  const CurvatureData rs = round_sphere(8);
  const Eigen::VectorXd h = hbar_field(rs);
  const bool exact = (h.array() == 8.0).all();
  bool flat_error = false;
  try {
    mu0_field(flat_geometry(8), bubble_constants(shared_kernel(7)));
  } catch (const PositivityError&) {
    flat_error = true;
  }
  verdict(8, exact && flat_error,
          std::string("round sphere hbar ") + (exact ? "== 8 at every node" : "differs from 8") +
              ", flat geometry " + (flat_error ? "raises the positivity error" : "does not raise"));
}

}  // namespace

int main() {
  guarded(1, identities);
  guarded(2, eigenpair);
  guarded(3, projections);
  guarded(4, layer_scaling);
  guarded(5, solver_ratio);
  guarded(6, degeneracy);
  guarded(7, gaps);
  guarded(8, positivity);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
