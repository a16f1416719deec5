#include "concentra/bubble.hpp"

#include <gsl/gsl_spline.h>

#include <cmath>

#include "concentra/errors.hpp"
#include "concentra/radial.hpp"

namespace concentra {

struct BubbleKernel::EigenData {
  RadialGrid grid;
  std::vector<double> u;
  EigenDiagnostics diag;
  double r_match = 0.0;
  double sqrt_lambda = 0.0;
  std::shared_ptr<gsl_spline> spline;
};

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

BubbleKernel::BubbleKernel(int N, const EigenOptions& opts) : dims_(DimensionParams::make(N)) {
  auto data = std::make_shared<EigenData>();
  data->grid = RadialGrid::uniform(opts.h, opts.r_max);
  const auto& grid = data->grid;
  const std::size_t n = grid.size();

  std::vector<double> pot(n);
  for (std::size_t i = 0; i < n; ++i) pot[i] = -potential(grid.r(i));

  // the only negative eigenvalue of -Delta - V is -lambda0 and it lies above -V(0)
  double shift = pot[0];
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(-grid.r(i));
  double nu = 0.0, nu_prev = 0.0;
  int iters = 0;
  for (int outer = 0; outer < 4; ++outer) {
    RadialProblem prob;
    prob.dim = N;
    prob.potential = pot;
    for (auto& c : prob.potential) c -= shift;
    prob.order = opts.order;
    RadialSolver solver(grid, prob);
    for (int it = 0; it < 200; ++it) {
      ++iters;
      auto y = solver.solve(x);
      nu = shift + dot(y, x) / dot(y, y);
      const double norm = std::sqrt(dot(y, y));
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
      if (it > 0 && std::abs(nu - nu_prev) <= (outer == 0 ? 1e-8 : 1e-15) * std::abs(nu)) break;
      nu_prev = nu;
    }
    shift = nu * (1.0 + 1e-7);
  }
  const double lambda = -nu;
  if (!(lambda > 0.0)) throw ConcentraError(ErrorKind::Numerical, "eigenvalue iteration did not find lambda0 > 0");

  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = x[i] * x[i] * std::pow(grid.r(i), N - 1);
  double scale = 1.0 / std::sqrt(sphere_area(N) * grid.integrate(sq));
  if (x[0] < 0) scale = -scale;
  for (auto& v : x) v *= scale;

  // consistency residual with a higher-order stencil
  {
    const auto st = grid.stencils(1, opts.order + 2);
    double res = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t qq = 0; qq < st[i].index.size(); ++qq) {
        d1 += st[i].d1[qq] * x[st[i].index[qq]];
        d2 += st[i].d2[qq] * x[st[i].index[qq]];
      }
      const double lap = i == 0 ? N * d2 : d2 + (N - 1.0) / grid.r(i) * d1;
      res = std::max(res, std::abs(lap - pot[i] * x[i] - lambda * x[i]));
    }
    data->diag.residual_inf = res;
  }

  data->u = x;
  data->diag.lambda0 = lambda;
  data->diag.h = grid.r(1);
  data->diag.iterations = iters;
  data->sqrt_lambda = std::sqrt(lambda);

  std::size_t im = 0;
  while (im + 1 < n && grid.r(im + 1) <= opts.r_match) ++im;
  data->r_match = grid.r(im);
  data->diag.tail_coefficient =
      x[im] / (std::exp(-data->sqrt_lambda * data->r_match) * std::pow(data->r_match, -(N - 1) / 2.0));
  data->spline = std::shared_ptr<gsl_spline>(gsl_spline_alloc(gsl_interp_cspline, im + 1), gsl_spline_free);
  gsl_spline_init(data->spline.get(), grid.nodes().data(), x.data(), im + 1);
  eig_ = data;
}

double BubbleKernel::lambda0() const { return eig_->diag.lambda0; }
const EigenDiagnostics& BubbleKernel::eigen_diagnostics() const { return eig_->diag; }
const std::vector<double>& BubbleKernel::z_nodes() const { return eig_->u; }
double BubbleKernel::z_grid_step() const { return eig_->diag.h; }

double BubbleKernel::w0(double r) const {
  return dims_.alpha_N * std::pow(1.0 + r * r, -dims_.half_nm2);
}

double BubbleKernel::q(double r) const {
  return -dims_.alpha_N * (dims_.N - 2.0) * std::pow(1.0 + r * r, -dims_.N / 2.0);
}

double BubbleKernel::s(double r) const {
  return dims_.alpha_N * (dims_.N - 2.0) * dims_.N * std::pow(1.0 + r * r, -dims_.N / 2.0 - 1.0);
}

double BubbleKernel::z0(double r) const { return r * r * q(r) + dims_.half_nm2 * w0(r); }

double BubbleKernel::potential(double r) const { return dims_.p * std::pow(w0(r), dims_.p - 1.0); }

double BubbleKernel::z_profile(double r) const {
  r = std::abs(r);
  if (r <= eig_->r_match) return gsl_spline_eval(eig_->spline.get(), r, nullptr);
  return eig_->diag.tail_coefficient * std::exp(-eig_->sqrt_lambda * r) * std::pow(r, -(dims_.N - 1) / 2.0);
}

double BubbleKernel::eval_bubble(const Eigen::VectorXd& xi, double mu) const {
  if (!(mu > 0.0)) throw ConcentraError(ErrorKind::Domain, "bubble scale mu must be positive");
  return std::pow(mu, -dims_.half_nm2) * w0(xi.norm() / mu);
}

double BubbleKernel::eval_kernel(int j, const Eigen::VectorXd& xi) const {
  if (j < 0 || j >= dims_.N || xi.size() != dims_.N)
    throw ConcentraError(ErrorKind::Domain, "kernel index out of range");
  const double r = xi.norm();
  if (j == 0) return z0(r);
  return xi(j - 1) * q(r);
}

Eigen::VectorXd BubbleKernel::eval_grad(const Eigen::VectorXd& xi) const { return xi * q(xi.norm()); }

Eigen::MatrixXd BubbleKernel::eval_hess(const Eigen::VectorXd& xi) const {
  const double r = xi.norm();
  Eigen::MatrixXd h = xi * xi.transpose() * s(r);
  h.diagonal().array() += q(r);
  return h;
}

}  // namespace concentra
