#include "concentra/metric_jet.hpp"

#include <cmath>

namespace concentra {

PolyMatrix poly_matmul(const PolyMatrix& a, const PolyMatrix& b, int trunc_var, int max_power) {
  const std::size_t n = a.size();
  const int nv = a[0][0].nvars();
  PolyMatrix c(n, std::vector<Poly>(n, Poly(nv)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b[k][j].is_zero()) continue;
        c[i][j] += (a[i][k] * b[k][j]).truncate_in(trunc_var, max_power);
      }
    }
  return c;
}

namespace {

Poly trace(const PolyMatrix& m) {
  Poly t(m[0][0].nvars());
  for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return t;
}

}  // namespace

double MetricJet::eval(const Poly& p, const Eigen::VectorXd& X, double eps) const {
  std::vector<double> x(N + 1);
  for (int i = 0; i < N; ++i) x[i] = X(i);
  x[N] = eps;
  return p.eval(x.data());
}

Eigen::MatrixXd MetricJet::eval_metric(const Eigen::VectorXd& X, double eps) const {
  Eigen::MatrixXd g(N + 1, N + 1);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) g(i, j) = eval(metric[i][j], X, eps);
  return g;
}

Eigen::MatrixXd MetricJet::eval_inverse(const Eigen::VectorXd& X, double eps) const {
  Eigen::MatrixXd g(N + 1, N + 1);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) g(i, j) = eval(inverse[i][j], X, eps);
  return g;
}

MetricJet metric_jet(const CurvatureData& cd, int node) {
  const int N = cd.N;
  const int nv = N + 1;
  const int ev = N;
  MetricJet jet;
  jet.N = N;
  const Eigen::MatrixXd& H = cd.H[node];
  const Eigen::MatrixXd H2 = cd.H2(node);
  const Eigen::VectorXd& Gam = cd.Gamma[node];
  const double gt = cd.g_tilde(node);

  const Poly eps = Poly::variable(nv, ev);
  const Poly xn = Poly::variable(nv, N - 1);
  auto X = [&](int i) { return Poly::variable(nv, i - 1); };
  const Poly eps2 = eps * eps;

  PolyMatrix g(N + 1, std::vector<Poly>(N + 1, Poly(nv)));
  g[N][N] = Poly::constant(nv, 1.0);
  for (int i = 1; i < N; ++i)
    for (int j = 1; j < N; ++j) {
      Poly e = Poly::constant(nv, i == j ? 1.0 : 0.0);
      e -= 2.0 * H(i, j) * (eps * xn);
      for (int s = 1; s < N; ++s)
        for (int t = 1; t < N; ++t) {
          const double r = cd.riemann(node, i, s, t, j);
          if (r != 0.0) e += (r / 3.0) * (eps2 * X(s) * X(t));
        }
      e += H2(i, j) * (eps2 * xn * xn);
      g[i][j] = e;
    }
  for (int j = 1; j < N; ++j) {
    const Poly e = -(H(0, j) + gt * H(0, j)) * (eps * xn);
    g[0][j] = e;
    g[j][0] = e;
  }
  {
    Poly e = Poly::constant(nv, gt);
    for (int i = 1; i < N; ++i) e -= 2.0 * gt * Gam(i) * (eps * X(i));
    e -= 2.0 * H(0, 0) * gt * (eps * xn);
    for (int s = 1; s < N; ++s)
      for (int l = 1; l < N; ++l) {
        const double c = cd.riemann(node, s, 0, 0, l) + gt * Gam(s) * Gam(l);
        if (c != 0.0) e += c * (eps2 * X(s) * X(l));
      }
    e += H2(0, 0) * (eps2 * xn * xn);
    for (int k = 1; k < N; ++k) e += 4.0 * gt * H(0, 0) * Gam(k) * (eps2 * xn * X(k));
    g[0][0] = e;
  }
  jet.metric = g;

  // g = G0 + E, G0 = diag(g~, 1, ..., 1)
  PolyMatrix g0inv(N + 1, std::vector<Poly>(N + 1, Poly(nv)));
  PolyMatrix E = g;
  for (int i = 0; i <= N; ++i) {
    const double d = i == 0 ? gt : 1.0;
    g0inv[i][i] = Poly::constant(nv, 1.0 / d);
    E[i][i] -= Poly::constant(nv, d);
  }
  const PolyMatrix F = poly_matmul(g0inv, E, ev, 2);
  const PolyMatrix F2 = poly_matmul(F, F, ev, 2);
  PolyMatrix inv = g0inv;
  const PolyMatrix FG = poly_matmul(F, g0inv, ev, 2);
  const PolyMatrix F2G = poly_matmul(F2, g0inv, ev, 2);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) inv[i][j] = (inv[i][j] - FG[i][j] + F2G[i][j]).pruned(0.0);
  jet.inverse = inv;

  const Poly ell = (trace(F) - 0.5 * trace(F2)).truncate_in(ev, 2);
  jet.log_det = ell.pruned(0.0);
  const Poly half = 0.5 * ell + 0.125 * (ell * ell).truncate_in(ev, 2);
  jet.sqrt_det = (std::sqrt(gt) * (Poly::constant(nv, 1.0) + half)).pruned(0.0);

  {
    const double trH = H.trace();
    const double trH2 = H2.trace();
    Poly s = Poly::constant(nv, 1.0);
    Poly l(nv);
    s -= trH * (eps * xn);
    l -= 2.0 * trH * (eps * xn);
    for (int m = 1; m < N; ++m)
      for (int ll = 1; ll < N; ++ll) {
        double rii = 0.0;
        for (int i = 1; i < N; ++i) rii += cd.riemann(node, m, i, i, ll);
        const double mixed = cd.riemann(node, m, 0, 0, ll) / gt - Gam(m) * Gam(ll);
        const Poly xx = eps2 * X(m) * X(ll);
        s += (rii / 6.0 + 0.5 * mixed) * xx;
        l += (rii / 3.0 + mixed) * xx;
      }
    s += (0.5 * trH * trH - trH2) * (eps2 * xn * xn);
    l -= trH2 * (eps2 * xn * xn);
    jet.sqrt_det_printed = (std::sqrt(gt) * s).pruned(0.0);
    jet.log_det_printed = l.pruned(0.0);
  }
  return jet;
}

}  // namespace concentra
