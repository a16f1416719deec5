#include "concentra/halfspace_solver.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "concentra/errors.hpp"
#include "concentra/special.hpp"

namespace concentra {

namespace {

MonoKey var_key(int v) { return static_cast<MonoKey>(1) << (4 * v); }

}  // namespace

void WeightedNormParams::validate(int N) const {
  if (!(r_weight > 2.0 && r_weight < N))
    throw ConcentraError(ErrorKind::Validation, "weighted norm needs 2 < r_weight < N");
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConcentraError(ErrorKind::Validation, "sigma must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConcentraError(ErrorKind::Validation, "eps must be positive");
  if (!(delta > 0.0)) throw ConcentraError(ErrorKind::Validation, "delta must be positive");
}

double norm_weight(double radius, double r_weight, const WeightedNormParams& p) {
  if (radius <= p.delta / std::sqrt(p.eps)) return std::pow(1.0 + radius * radius, r_weight / 2.0);
  return std::pow(p.eps, -r_weight / 2.0);
}

double weighted_norm_samples(const HalfspaceGrid& g, const std::vector<double>& values, int ndir, double r_weight,
                             const WeightedNormParams& p) {
  const double split = p.delta / std::sqrt(p.eps);
  double inner = 0.0, outer = 0.0;
  const int nt = g.nt();
  for (int i = 0; i < g.nr(); ++i) {
    double m = 0.0;
    const double* v = &values[static_cast<std::size_t>(i) * nt * ndir];
    for (int j = 0; j < nt * ndir; ++j) m = std::max(m, std::abs(v[j]));
    const double w = norm_weight(g.r(i), r_weight, p) * m;
    if (g.r(i) <= split)
      inner = std::max(inner, w);
    else
      outer = std::max(outer, w);
  }
  return inner + outer;
}

double weighted_norm(const SymFunction& f, double r_weight, const WeightedNormParams& p) {
  if (f.empty()) return 0.0;
  const auto& dirs = f.grid().directions();
  return weighted_norm_samples(f.grid(), f.sample(dirs), static_cast<int>(dirs.size()), r_weight, p);
}

double weighted_norm(const ModeFunction& f, double r_weight, const WeightedNormParams& p) {
  if (f.empty()) return 0.0;
  const auto& dirs = f.grid().directions();
  return weighted_norm_samples(f.grid(), f.sample(dirs), static_cast<int>(dirs.size()), r_weight, p);
}

double weighted_norm(const SymFunction& f, const WeightedNormParams& p) { return weighted_norm(f, p.r_weight, p); }
double weighted_norm(const ModeFunction& f, const WeightedNormParams& p) { return weighted_norm(f, p.r_weight, p); }

double holder_seminorm_estimate(const ModeFunction& f, const WeightedNormParams& p, const HolderSampling& s) {
  if (f.empty()) return 0.0;
  const auto& g = f.grid();
  const int N = g.N();
  const auto& dirs = g.directions();
  const double split = p.delta / std::sqrt(p.eps);
  const double expo = p.r_weight + p.sigma;
  std::vector<Eigen::VectorXd> picks;
  const int nd = std::max(1, s.directions);
  for (int k = 0; k < nd; ++k) picks.push_back(dirs[(k * dirs.size()) / nd]);
  double best = 0.0;
  Eigen::VectorXd xi(N), step(N);
  for (int i = 0; i < g.nr(); i += std::max(1, s.r_stride)) {
    const double r = g.r(i);
    if (r + 1.0 > g.radial().r_max()) break;
    const double w = r <= split ? std::pow(1.0 + r * r, expo / 2.0) : std::pow(p.eps, -expo / 2.0);
    for (int q = 0; q < g.nt(); q += std::max(1, s.theta_stride))
      for (const auto& om : picks) {
        xi.head(N - 1) = r * g.sin_theta(q) * om;
        xi(N - 1) = r * g.t(q);
        const double f0 = f.eval(xi);
        for (int lev = 0; lev < s.levels; ++lev) {
          const double h = std::pow(2.0, -lev);
          for (int a = 0; a < N; ++a)
            for (double sg : {1.0, -1.0}) {
              step.setZero();
              step(a) = sg * h;
              const double d = std::abs(f.eval(xi + step) - f0) / std::pow(h, p.sigma);
              best = std::max(best, w * d);
            }
        }
      }
  }
  return best;
}

Eigen::VectorXd project_kernel(const SymFunction& f) {
  const auto& g = f.grid();
  const int N = g.N();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N + 1);
  out(0) = f.integrate_against(0, g.z0());
  for (int l = 1; l < N; ++l) out(l) = f.integrate_against(var_key(l - 1), g.q());
  out(N) = f.integrate_against(0, g.z());
  return out;
}

Eigen::VectorXd project_kernel(const ModeFunction& f) {
  const auto& g = f.grid();
  const int N = g.N();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N + 1);
  // harmonics of different degree are orthogonal on the sphere, so only degrees 0 and 1 contribute
  auto it = f.channels().find(0);
  if (it != f.channels().end()) {
    const Eigen::MatrixXd K = f.nodal(0);
    out(0) = g.integrate(0, K.cwiseProduct(g.z0()));
    out(N) = g.integrate(0, K.cwiseProduct(g.z()));
  }
  for (int l = 1; l < N; ++l) {
    const MonoKey k = var_key(l - 1);
    if (!f.channels().count(k)) continue;
    out(l) = g.integrate(mono_mul(k, k), f.nodal(k).cwiseProduct(g.q()));
  }
  return out;
}

Eigen::VectorXd kernel_projection_scale(const SymFunction& f) {
  const auto& g = f.grid();
  const int N = g.N();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  if (f.empty()) return out;
  const auto& dirs = g.directions();
  const int nd = static_cast<int>(dirs.size());
  const auto vals = f.sample(dirs);
  const double area = sphere_area(N - 1);
  const auto& bw = g.base_weight();
  for (int i = 0; i < g.nr(); ++i)
    for (int q = 0; q < g.nt(); ++q) {
      const double* v = &vals[(static_cast<std::size_t>(i) * g.nt() + q) * nd];
      const double rho = g.r(i) * g.sin_theta(q);
      double m0 = 0.0;
      for (int k = 0; k < nd; ++k) m0 += std::abs(v[k]);
      out(0) += bw(i, q) * area * m0 / nd * std::abs(g.z0()(i, q));
      for (int l = 1; l < N; ++l) {
        double ml = 0.0;
        for (int k = 0; k < nd; ++k) ml += std::abs(v[k] * dirs[k](l - 1));
        out(l) += bw(i, q) * area * ml / nd * rho * std::abs(g.q()(i, q));
      }
    }
  return out;
}

std::string kernel_slot_name(int j, int N) {
  if (j == N) return "Z";
  return "Z" + std::to_string(j);
}

LinearizedSolver::LinearizedSolver(std::shared_ptr<const HalfspaceGrid> grid, double a, double eps, SolverOptions opts)
    : grid_(std::move(grid)), shift_(eps * a), opts_(opts) {
  if (!(a > 0.0) || !(eps >= 0.0))
    throw ConcentraError(ErrorKind::Domain, "solver needs a > 0 and eps >= 0");
  if (std::abs(shift_ - grid_->kernel().lambda0()) < 1e-10)
    throw ConcentraError(ErrorKind::Numerical, "eps a coincides with lambda0; the radial problem is singular");
}

RadialProblem LinearizedSolver::radial_problem(int d, int k) const {
  const auto& g = *grid_;
  RadialProblem prob;
  prob.dim = g.N() + 2 * d;
  prob.degree = 2 * k;
  prob.order = g.options().order;
  prob.potential.resize(g.nr());
  for (int i = 0; i < g.nr(); ++i) prob.potential[i] = -g.potential()(i, 0) + shift_;
  prob.outer = OuterCondition::Robin;
  const double R = g.radial().r_max();
  if (shift_ > 0.0)
    prob.robin_log_derivative = bessel_tail_log_derivative(prob.dim, prob.degree, std::sqrt(shift_), R);
  else
    prob.robin_log_derivative = (2.0 - opts_.norm.r_weight) / R;
  return prob;
}

const RadialSolver& LinearizedSolver::radial_solver(int d, int k) const {
  auto key = std::make_pair(d, k);
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  auto solver = std::make_unique<RadialSolver>(grid_->radial(), radial_problem(d, k));
  return *cache_.emplace(key, std::move(solver)).first->second;
}

ModeFunction LinearizedSolver::solve(const SymFunction& g, SolveDiagnostics* diag) const {
  const auto& grid = *grid_;
  const int N = grid.N();
  const int nr = grid.nr(), nt = grid.nt();
  Eigen::VectorXd proj = project_kernel(g);
  if (opts_.check_precondition && !g.empty()) {
    const Eigen::VectorXd scale = kernel_projection_scale(g);
    for (int j = 0; j < N; ++j) {
      if (std::abs(proj(j)) > opts_.precondition_tol * scale(j) + 1e-300) {
        std::ostringstream msg;
        msg << "right-hand side is not orthogonal to " << kernel_slot_name(j, N) << ": projection " << proj(j)
            << " against scale " << scale(j);
        throw PreconditionError(kernel_slot_name(j, N), proj(j), msg.str());
      }
    }
    if (diag) diag->rhs_scale = scale;
  }

  const ModeFunction G = ModeFunction::from_sym(g);
  ModeFunction phi(grid_);
  int solves = 0;
  std::vector<double> rhs(nr);
  for (const auto& [ch, v] : G.channels()) {
    const int d = mono_degree(ch, grid.nbar());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nr, nt);
    for (int k = 0; k < nt; ++k) {
      if (v.col(k).cwiseAbs().maxCoeff() == 0.0) continue;
      for (int i = 0; i < nr; ++i) rhs[i] = v(i, k);
      const auto u = radial_solver(d, k).solve(rhs);
      for (int i = 0; i < nr; ++i) out(i, k) = u[i];
      ++solves;
    }
    phi.channels().emplace(ch, std::move(out));
  }

  // radial slots: int phi Z0 = 0 and int phi Z = beta int Z^2
  const Eigen::MatrixXd& z0 = grid.z0();
  const Eigen::MatrixXd& z = grid.z();
  const double zz = grid.integrate(0, z.cwiseProduct(z));
  const double beta = proj(N) / ((shift_ - grid.kernel().lambda0()) * zz);
  {
    Eigen::Matrix2d gram;
    gram << grid.integrate(0, z0.cwiseProduct(z0)), grid.integrate(0, z0.cwiseProduct(z)),
        grid.integrate(0, z.cwiseProduct(z0)), zz;
    const Eigen::VectorXd cur = project_kernel(phi);
    Eigen::Vector2d target(-cur(0), beta * zz - cur(N));
    const Eigen::Vector2d c = gram.lu().solve(target);
    auto it = phi.channels().find(0);
    if (it == phi.channels().end()) it = phi.channels().emplace(0, Eigen::MatrixXd::Zero(nr, nt)).first;
    it->second.col(0) += c(0) * z0.col(0) + c(1) * z.col(0);
  }
  // tangential translations Z_l = xi_l q
  for (int l = 1; l < N; ++l) {
    const MonoKey k = var_key(l - 1);
    auto it = phi.channels().find(k);
    if (it == phi.channels().end()) continue;
    const MonoKey kk = mono_mul(k, k);
    const double num = grid.integrate(kk, phi.nodal(k).cwiseProduct(grid.q()));
    const double den = grid.integrate(kk, grid.q().cwiseProduct(grid.q()));
    it->second.col(0) -= (num / den) * grid.q().col(0);
  }

  if (diag) {
    diag->rhs_projection = proj;
    diag->post_projection = project_kernel(phi);
    diag->beta = beta;
    diag->shift = shift_;
    diag->radial_solves = solves;
    if (opts_.compute_norms) {
      diag->norm_rhs = weighted_norm(g, opts_.norm.r_weight, opts_.norm);
      diag->norm_phi = weighted_norm(phi, opts_.norm.r_weight - 2.0, opts_.norm);
      diag->ratio = diag->norm_rhs > 0 ? diag->norm_phi / diag->norm_rhs : 0.0;
    }
  }
  return phi;
}

ModeFunction solve_linearized(const SymFunction& g, double a, double eps, const SolverOptions& opts,
                              SolveDiagnostics* diag) {
  LinearizedSolver solver(g.grid_ptr(), a, eps, opts);
  return solver.solve(g, diag);
}

}  // namespace concentra

namespace concentra {

RatioEnsemble ratio_ensemble(const std::shared_ptr<const HalfspaceGrid>& grid, double a,
                             const std::vector<double>& eps_list, int members, std::uint64_t seed, double r_weight) {
  if (members < 1 || eps_list.empty()) throw ConcentraError(ErrorKind::Domain, "empty ensemble");
  const int N = grid->N(), nr = grid->nr(), nt = grid->nt();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> width(0.5, 2.0);

  SymFunction z0(grid);
  z0.add(0, grid->z0());
  const double z0z0 = project_kernel(z0)(0);
  SymFunction z1(grid);
  z1.add(var_key(0), grid->q());
  const double z1z1 = project_kernel(z1)(1);

  auto profile = [&](double s, double power) {
    Eigen::MatrixXd F(nr, nt);
    for (int i = 0; i < nr; ++i) F.row(i).setConstant(std::pow(1.0 + std::pow(grid->r(i) / s, 2), -power / 2.0));
    return F;
  };

  std::vector<SymFunction> rhs;
  for (int m = 0; m < members; ++m) {
    SymFunction g(grid);
    const double s = width(rng);
    g.add(0, profile(s, r_weight), gauss(rng));
    Poly lin(N), quad(N);
    for (int i = 0; i < N - 1; ++i) lin += Poly::variable(N, i, gauss(rng));
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N - 1; ++j) quad += Poly::variable(N, i) * Poly::variable(N, j, gauss(rng));
    quad += Poly::variable(N, N - 1) * Poly::variable(N, N - 1, gauss(rng));
    g.add_poly(lin, profile(s, r_weight + 1.0), 1.0 / s);
    g.add_poly(quad, profile(s, r_weight + 2.0), 1.0 / (s * s));
    const Eigen::VectorXd p = project_kernel(g);
    g -= (p(0) / z0z0) * z0;
    for (int l = 1; l < N; ++l) {
      SymFunction zl(grid);
      zl.add(var_key(l - 1), grid->q());
      g -= (p(l) / z1z1) * zl;
    }
    rhs.push_back(std::move(g));
  }

  RatioEnsemble out;
  out.eps = eps_list;
  out.ratio.resize(members, eps_list.size());
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    SolverOptions so;
    so.compute_norms = true;
    so.norm.r_weight = r_weight;
    so.norm.eps = eps_list[e];
    so.norm.validate(N);
    LinearizedSolver solver(grid, a, eps_list[e], so);
    for (int m = 0; m < members; ++m) {
      SolveDiagnostics d;
      solver.solve(rhs[m], &d);
      out.ratio(m, e) = d.ratio;
    }
  }
  out.min_ratio = out.ratio.minCoeff();
  out.max_ratio = out.ratio.maxCoeff();
  return out;
}

}  // namespace concentra
