#include "concentra/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <random>

#include "concentra/errors.hpp"
#include "concentra/halfspace_solver.hpp"

namespace concentra {

double ReducedForms::P(const Eigen::VectorXd& delta) const {
  const Eigen::VectorXd dd = cd.grid.derivative(delta, 1);
  return 0.5 * A * eps * eps * cd.grid.inner(dd, dd) + 0.5 * B * eps * cd.grid.inner(delta, delta);
}

double ReducedForms::Q(const Eigen::MatrixXd& d) const {
  const Eigen::MatrixXd dd = cd.grid.derivative_columns(d, 1);
  const double h = cd.L / cd.size();
  double grad = 0.0, pot = 0.0;
  for (int v = 0; v < cd.size(); ++v) {
    grad += h * dd.row(v).squaredNorm() / cd.g_tilde(v);
    const Eigen::VectorXd x = d.row(v).transpose();
    pot += h * x.dot(cd.jacobi_potential(v) * x);
  }
  return 0.5 * C * eps * eps * (grad + pot);
}

double ReducedForms::R(const Eigen::VectorXd& e) const {
  const Eigen::VectorXd de = cd.grid.derivative(e, 1);
  return 0.5 * D * (eps * eps * cd.grid.inner(de, de) - lambda0 * cd.grid.inner(e, e));
}

ReducedForms reduced_forms(const CurvatureData& cd, const ConstantsTable& ct, double eps) {
  if (!(eps > 0.0)) throw ConcentraError(ErrorKind::Domain, "eps must be positive");
  ReducedForms f;
  f.cd = cd;
  f.eps = eps;
  f.A = ct.A;
  f.B = ct.B;
  f.C = ct.C;
  f.D = ct.D;
  f.lambda0 = ct.lambda0;
  f.excluded = {"o(eps^2) corrections multiplied by the beta functions",
                "compact perturbations P1, Q1, R1",
                "cross-term functional M (measured by decompose, not folded in)"};
  return f;
}

double ReducedSpectrum::wavenumber2(int m) const {
  const double k = 2.0 * M_PI * m / L;
  return k * k / g_tilde;
}

Eigen::VectorXd ReducedSpectrum::eigenvalues(double sigma, int J) const {
  Eigen::VectorXd out(std::max(J, 0));
  int m = 0, filled = 0;
  while (filled < J) {
    const int mult = m == 0 ? 1 : 2;
    for (int c = 0; c < mult && filled < J; ++c) out(filled++) = eigenvalue(m, sigma);
    ++m;
  }
  return out;
}

int ReducedSpectrum::max_mode(double sigma_min) const {
  if (!(sigma_min > 0.0)) throw ConcentraError(ErrorKind::Domain, "sigma must be positive");
  return static_cast<int>(std::floor(L * std::sqrt(g_tilde * lambda0 / sigma_min) / (2.0 * M_PI)));
}

ReducedSpectrum reduced_spectrum(const ReducedForms& forms) {
  ReducedSpectrum s;
  s.D = forms.D;
  s.lambda0 = forms.lambda0;
  s.L = forms.cd.L;
  s.g_tilde = forms.cd.g_tilde.mean();
  return s;
}

ReducedSpectrum reduced_spectrum(const CurvatureData& cd, const ConstantsTable& ct) {
  return reduced_spectrum(reduced_forms(cd, ct, 1.0));
}

Eigen::VectorXd reduced_eigenvalues(const ReducedForms& forms, double eps, int J) {
  return reduced_spectrum(forms).eigenvalues(eps * eps, J);
}

long weyl_count(double sigma, double a_const, double L) {
  if (!(sigma > 0.0) || !(a_const > 0.0) || !(L > 0.0))
    throw ConcentraError(ErrorKind::Domain, "weyl_count needs sigma, a, L > 0");
  const double x = L * std::sqrt(a_const / sigma) / (2.0 * M_PI);
  // boundary modes count; the relative slack absorbs rounding of exact squares
  const long m = static_cast<long>(std::floor(x * (1.0 + 1e-12)));
  return 2 * m + 1;
}

GapResult find_gap_epsilon(const ReducedSpectrum& spec, int level, double c_target, int grid_points) {
  if (level < 0) throw ConcentraError(ErrorKind::Domain, "level must be non-negative");
  if (grid_points < 16) throw ConcentraError(ErrorKind::Domain, "sigma grid too coarse");
  GapResult g;
  g.level = level;
  g.grid_points = grid_points;
  g.sigma_lo = std::ldexp(1.0, -(level + 1));
  g.sigma_hi = std::ldexp(1.0, -level);
  const double a = g.sigma_lo, b = g.sigma_hi;
  const double step = (b - a) / (grid_points - 1);
  const int mmax = spec.max_mode(a);
  for (int m = 0; m <= mmax; ++m) {
    double prev = spec.eigenvalue(m, a);
    for (int k = 1; k < grid_points; ++k) {
      const double s1 = a + step * k;
      const double cur = spec.eigenvalue(m, s1);
      if ((prev < 0.0) != (cur < 0.0)) {
        double lo = s1 - step, hi = s1;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((spec.eigenvalue(m, mid) < 0.0) == (prev < 0.0))
            lo = mid;
          else
            hi = mid;
        }
        const int mult = m == 0 ? 1 : 2;
        g.crossings.push_back({m, mult, 0.5 * (lo + hi)});
        g.crossing_count += mult;
      }
      prev = cur;
    }
  }
  std::sort(g.crossings.begin(), g.crossings.end(),
            [](const Crossing& x, const Crossing& y) { return x.sigma < y.sigma; });
  std::vector<double> pts{a};
  for (const auto& c : g.crossings) pts.push_back(c.sigma);
  pts.push_back(b);
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k] - pts[k - 1] > g.gap_width) {
      g.gap_width = pts[k] - pts[k - 1];
      g.gap_lo = pts[k - 1];
      g.gap_hi = pts[k];
    }
  if (g.gap_width < step)
    throw ConcentraError(ErrorKind::Resolution,
                         "no crossing-free subinterval wider than the sigma grid step at level " +
                             std::to_string(level));
  g.sigma_l = 0.5 * (g.gap_lo + g.gap_hi);
  g.eps_l = std::sqrt(g.sigma_l);
  double gap = std::abs(spec.eigenvalue(0, g.sigma_l));
  for (int m = 1; m <= mmax + 1; ++m) gap = std::min(gap, std::abs(spec.eigenvalue(m, g.sigma_l)));
  g.certified_gap = gap;
  g.c_observed = gap / g.eps_l;
  g.meets_target = g.c_observed >= c_target;
  return g;
}

Dep2Report dep2_check(const ReducedSpectrum& spec, int level, int samples) {
  Dep2Report rep;
  const double a = std::ldexp(1.0, -(level + 1)), b = std::ldexp(1.0, -level);
  const int mmax = spec.max_mode(a) + 2;
  struct Pair {
    double s1, s2;
  };
  std::vector<Pair> pairs;
  for (int s = 0; s < samples; ++s) {
    const double s2 = a + (b - a) * (s + 1.0) / samples;
    const double u = ((s * 5) % 7 + 1) / 8.0;
    pairs.push_back({s2 * (0.5 + 0.5 * u), s2});
  }
  rep.gamma_minus = INFINITY;
  rep.gamma_plus = 0.0;
  for (const auto& p : pairs)
    for (int m = 0; m <= mmax; ++m) {
      const double d = spec.eigenvalue(m, p.s2) / p.s2 - spec.eigenvalue(m, p.s1) / p.s1;
      const double gam = d * p.s1 * p.s2 / (p.s2 - p.s1);
      rep.gamma_minus = std::min(rep.gamma_minus, gam);
      rep.gamma_plus = std::max(rep.gamma_plus, gam);
    }
  for (const auto& p : pairs)
    for (int m = 0; m <= mmax; ++m) {
      const double d = spec.eigenvalue(m, p.s2) / p.s2 - spec.eigenvalue(m, p.s1) / p.s1;
      const double lower = (p.s2 - p.s1) * rep.gamma_minus / (2.0 * p.s2 * p.s2);
      const double upper = 2.0 * (p.s2 - p.s1) * rep.gamma_plus / (p.s1 * p.s1);
      ++rep.pairs;
      if (d < lower || d > upper) ++rep.violations;
    }
  rep.pass = rep.gamma_minus > 0.0 && rep.violations == 0;
  return rep;
}

GapSuite gap_suite(const ReducedSpectrum& spec, int level_lo, int level_hi, double c_target, double band,
                   int grid_points) {
  if (level_lo < 0 || level_hi < level_lo) throw ConcentraError(ErrorKind::Domain, "bad level range");
  GapSuite suite;
  suite.count_density = (std::sqrt(2.0) - 1.0) * std::sqrt(spec.lambda0 * spec.g_tilde) * spec.L / M_PI;
  suite.counts_ok = suite.dep2_ok = true;
  double wmin = INFINITY, wmax = 0.0, cmin = INFINITY, cmax = 0.0;
  for (int l = level_lo; l <= level_hi; ++l) {
    GapResult g = find_gap_epsilon(spec, l, c_target, grid_points);
    const long bound = weyl_count(g.sigma_lo, spec.lambda0, spec.L * std::sqrt(spec.g_tilde));
    const double scaled = g.crossing_count / std::pow(2.0, 0.5 * l);
    if (g.crossing_count > bound || scaled > 2.0 * suite.count_density || 2.0 * scaled < suite.count_density)
      suite.counts_ok = false;
    const double wc = g.gap_width * std::pow(2.0, 1.5 * l);
    wmin = std::min(wmin, wc);
    wmax = std::max(wmax, wc);
    cmin = std::min(cmin, g.c_observed);
    cmax = std::max(cmax, g.c_observed);
    Dep2Report d = dep2_check(spec, l);
    suite.dep2_ok = suite.dep2_ok && d.pass;
    suite.weyl_bound.push_back(bound);
    suite.levels.push_back(std::move(g));
    suite.dep2.push_back(d);
  }
  suite.width_constant = wmin;
  suite.width_spread = wmin / wmax;
  suite.c_min = cmin;
  suite.c_spread = cmin / cmax;
  suite.widths_ok = wmin > 0.0 && suite.width_spread >= band;
  suite.margins_ok = cmin > 0.0 && cmin >= c_target && suite.c_spread >= band;
  return suite;
}

CourantFischerReport courant_fischer_check(const ReducedSpectrum& spec, double eps, int grid, int dimension,
                                           std::uint64_t seed) {
  if (dimension < 1 || dimension > grid / 2) throw ConcentraError(ErrorKind::Domain, "trial dimension out of range");
  const PeriodicGrid pg(grid, spec.L);
  Eigen::MatrixXd D2 = pg.second_derivative_matrix();
  D2 = 0.5 * (D2 + D2.transpose());
  const Eigen::MatrixXd Lmat =
      spec.D * (-(eps * eps / spec.g_tilde) * D2 - spec.lambda0 * Eigen::MatrixXd::Identity(grid, grid));
  const Eigen::VectorXd exact = spec.eigenvalues(eps * eps, dimension);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_matrix = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
    return m;
  };
  auto ritz = [&](const Eigen::MatrixXd& V) {
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() *
                              Eigen::MatrixXd::Identity(V.rows(), V.cols());
    const Eigen::MatrixXd S = Q.transpose() * Lmat * Q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    return Eigen::VectorXd(es.eigenvalues());
  };
  CourantFischerReport rep;
  rep.dimension = dimension;
  const Eigen::VectorXd r1 = ritz(random_matrix(grid, dimension));
  rep.max_violation = (exact - r1).maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(Lmat);
  const Eigen::MatrixXd E = full.eigenvectors().leftCols(dimension);
  const Eigen::MatrixXd rot =
      Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(dimension, dimension)).householderQ();
  const Eigen::VectorXd r2 = ritz(E * rot);
  rep.max_agreement = (r2 - exact).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
  rep.pass = rep.max_violation <= 1e-10 * scale && rep.max_agreement <= 1e-8;
  return rep;
}

std::vector<SymFunction> kernel_functions(const std::shared_ptr<const HalfspaceGrid>& grid) {
  const int N = grid->N();
  std::vector<SymFunction> z;
  SymFunction z0(grid);
  z0.add(0, grid->z0());
  z.push_back(z0);
  for (int j = 1; j < N; ++j) {
    SymFunction zj(grid);
    zj.add_poly(Poly::variable(N, j - 1), grid->q());
    z.push_back(zj);
  }
  SymFunction zz(grid);
  zz.add(0, grid->z());
  z.push_back(zz);
  return z;
}

namespace {

struct KernelGram {
  double A, X, D, C;
};

KernelGram kernel_gram(const std::vector<SymFunction>& z) {
  const Eigen::VectorXd p0 = project_kernel(z.front());
  const Eigen::VectorXd pz = project_kernel(z.back());
  const Eigen::VectorXd p1 = project_kernel(z[1]);
  return {p0(0), p0(p0.size() - 1), pz(pz.size() - 1), p1(1)};
}

}  // namespace

Decomposition decompose(const std::vector<SymFunction>& phi, const Eigen::VectorXd& mu) {
  if (phi.empty()) throw ConcentraError(ErrorKind::Domain, "nothing to decompose");
  if (static_cast<int>(phi.size()) != mu.size()) throw ConcentraError(ErrorKind::Domain, "phi and mu sizes differ");
  const auto grid = phi.front().grid_ptr();
  const int N = grid->N(), M = static_cast<int>(phi.size());
  const auto z = kernel_functions(grid);
  const KernelGram G = kernel_gram(z);
  Eigen::Matrix2d gram;
  gram << G.A, G.X, G.X, G.D;
  const Eigen::PartialPivLU<Eigen::Matrix2d> lu(gram);

  Decomposition dec;
  dec.delta.resize(M);
  dec.e.resize(M);
  dec.d.resize(M, N - 1);
  for (int v = 0; v < M; ++v) {
    const Eigen::VectorXd b = project_kernel(phi[v]);
    const Eigen::Vector2d c = lu.solve(Eigen::Vector2d(b(0), b(N)));
    SymFunction perp = phi[v];
    perp -= c(0) * z.front();
    perp -= c(1) * z.back();
    for (int j = 1; j < N; ++j) {
      const double cj = b(j) / G.C;
      dec.d(v, j - 1) = mu(v) * cj;
      perp -= cj * z[j];
    }
    dec.delta(v) = mu(v) * c(0);
    dec.e(v) = c(1);
    const Eigen::VectorXd check = project_kernel(perp);
    dec.max_orthogonality = std::max(dec.max_orthogonality, check.cwiseAbs().maxCoeff());
    dec.cross_term = std::max(dec.cross_term, std::abs(2.0 * c(0) * c(1) * G.X));
    dec.phi_perp.push_back(std::move(perp));
  }
  return dec;
}

std::vector<SymFunction> reconstruct(const Decomposition& dec, const Eigen::VectorXd& mu) {
  if (dec.phi_perp.empty()) return {};
  const auto grid = dec.phi_perp.front().grid_ptr();
  const int N = grid->N();
  const auto z = kernel_functions(grid);
  std::vector<SymFunction> out;
  for (std::size_t v = 0; v < dec.phi_perp.size(); ++v) {
    SymFunction f = dec.phi_perp[v];
    f += (dec.delta(v) / mu(v)) * z.front();
    for (int j = 1; j < N; ++j) f += (dec.d(v, j - 1) / mu(v)) * z[j];
    f += dec.e(v) * z.back();
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace concentra
