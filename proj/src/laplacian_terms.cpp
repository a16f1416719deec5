#include "concentra/laplacian_terms.hpp"

#include <cmath>

#include "concentra/errors.hpp"
#include "concentra/metric_jet.hpp"

namespace concentra {

namespace {

constexpr int kBits = 4;

MonoKey jet_key(int N, int x_var, int x_pow, int xn_pow, int eps_pow) {
  std::vector<int> e(N + 1, 0);
  if (x_var >= 0) e[x_var] += x_pow;
  e[N - 1] += xn_pow;
  e[N] += eps_pow;
  return mono_make(e);
}

Poly graded_poly(int nv, int tau_var, const Graded& g) {
  Poly p(nv);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k] != 0.0) p.add_term(static_cast<MonoKey>(k) << (kBits * tau_var), g[k]);
  return p;
}

// tau-power -> polynomial in the first `nout` variables
std::map<int, Poly> split_tau(const Poly& p, int tau_var, int nout) {
  std::map<int, Poly> out;
  const MonoKey mask = ~(static_cast<MonoKey>(0xF) << (kBits * tau_var));
  for (const auto& [key, c] : p.terms()) {
    const int a = mono_exponent(key, tau_var);
    auto it = out.find(a);
    if (it == out.end()) it = out.emplace(a, Poly(nout)).first;
    it->second.add_term(key & mask, c);
  }
  return out;
}

Poly window(const std::map<int, Poly>& parts, int lo, int hi, int nout) {
  Poly p(nout);
  for (const auto& [a, q] : parts)
    if (a >= lo && a <= hi) p += q;
  return p;
}

struct LocalCoefficients {
  bool has_a = false;
  std::vector<std::vector<Poly>> A;
  std::vector<Poly> B;
  Poly C;
  // derived contractions
  std::vector<Poly> Axi;  // sum_J<n A_IJ xi_J, I < n
  Poly trA, xiAxi, Bxi, Anxi;
  bool empty = true;

  void finish(int N) {
    const int n = N - 1;
    empty = C.is_zero();
    for (const auto& b : B) empty = empty && b.is_zero();
    if (has_a)
      for (const auto& row : A)
        for (const auto& a : row) empty = empty && a.is_zero();
    if (empty) return;
    Bxi = Poly(N);
    for (int I = 0; I < n; ++I) Bxi += B[I] * Poly::variable(N, I);
    if (!has_a) return;
    Axi.assign(n, Poly(N));
    trA = Poly(N);
    xiAxi = Poly(N);
    Anxi = Poly(N);
    for (int I = 0; I < n; ++I) {
      for (int J = 0; J < n; ++J)
        if (!A[I][J].is_zero()) Axi[I] += A[I][J] * Poly::variable(N, J);
      trA += A[I][I];
      xiAxi += Axi[I] * Poly::variable(N, I);
      if (!A[I][n].is_zero()) Anxi += A[I][n] * Poly::variable(N, I);
    }
  }
};

void apply_channel(const LocalCoefficients& lc, const HalfspaceGrid& grid, MonoKey ch, const ChannelJet& J,
                   SymFunction& out) {
  const int N = grid.N(), n = N - 1;
  const Poly& e = grid.basis(ch);
  const auto& grad = grid.basis_gradient(ch);
  const int d = mono_degree(ch, n);
  Poly PK = lc.C * e;
  Poly Prho = lc.Bxi * e;
  Poly PN = lc.B[n] * e;
  if (d >= 1)
    for (int I = 0; I < n; ++I)
      if (!lc.B[I].is_zero() && !grad[I].is_zero()) PK += lc.B[I] * grad[I];
  if (lc.has_a) {
    const auto& hess = grid.basis_hessian(ch);
    if (d >= 2)
      for (int I = 0; I < n; ++I)
        for (int Jx = 0; Jx < n; ++Jx)
          if (!lc.A[I][Jx].is_zero() && !hess[I][Jx].is_zero()) PK += lc.A[I][Jx] * hess[I][Jx];
    if (d >= 1)
      for (int I = 0; I < n; ++I)
        if (!grad[I].is_zero()) {
          if (!lc.Axi[I].is_zero()) Prho += 2.0 * (lc.Axi[I] * grad[I]);
          if (!lc.A[I][n].is_zero()) PN += 2.0 * (lc.A[I][n] * grad[I]);
        }
    Prho += lc.trA * e;
    out.add_poly(lc.xiAxi * e, J.DrhoDrho);
    out.add_poly(2.0 * (lc.Anxi * e), J.DNDrho);
    out.add_poly(lc.A[n][n] * e, J.DNDN);
  }
  out.add_poly(PK, J.K);
  out.add_poly(Prho, J.Drho);
  out.add_poly(PN, J.DN);
}

}  // namespace

double PolyOperator::max_abs_coefficient() const {
  double m = std::max({C.max_abs_coefficient(), Cy.max_abs_coefficient(), Cyy.max_abs_coefficient()});
  for (const auto& row : A)
    for (const auto& a : row) m = std::max(m, a.max_abs_coefficient());
  for (const auto& b : B) m = std::max(m, b.max_abs_coefficient());
  for (const auto& b : By) m = std::max(m, b.max_abs_coefficient());
  return m;
}

std::vector<NodeGeometry> operator_geometry(const CurvatureData& cd) {
  const int N = cd.N, M = cd.size();
  std::vector<NodeGeometry> out(M);
  // first-order jet coefficients of g^{00} and log det along K
  Eigen::MatrixXd inv00(M, N), logdet(M, N);
  for (int v = 0; v < M; ++v) {
    const MetricJet jet = metric_jet(cd, v);
    auto& g = out[v];
    g.N = N;
    g.y = cd.y(v);
    g.H = cd.H[v];
    g.H2 = cd.H2(v);
    g.R = cd.R[v];
    g.Gamma = cd.Gamma[v];
    g.g_tilde = cd.g_tilde(v);
    g.frak_normal.assign(static_cast<std::size_t>(N - 1) * (N - 1) * (N - 1), 0.0);
    for (int i = 1; i < N; ++i)
      for (int j = 1; j < N; ++j)
        for (int l = 1; l < N; ++l)
          g.frak_normal[((i - 1) * (N - 1) + j - 1) * (N - 1) + l - 1] =
              jet.inverse[i][j].coefficient(jet_key(N, l - 1, 1, 1, 2));
    for (int j = 0; j < N; ++j) {
      const MonoKey key = j < N - 1 ? jet_key(N, j, 1, 0, 1) : jet_key(N, -1, 0, 1, 1);
      inv00(v, j) = jet.inverse[0][0].coefficient(key);
      logdet(v, j) = jet.log_det.coefficient(key);
    }
  }
  const Eigen::MatrixXd dinv = cd.grid.derivative_columns(inv00);
  const Eigen::MatrixXd dlog = cd.grid.derivative_columns(logdet);
  for (int v = 0; v < M; ++v) {
    out[v].frak_tangent.resize(N);
    for (int j = 0; j < N; ++j)
      out[v].frak_tangent(j) = dinv(v, j) + 0.5 * dlog(v, j) / out[v].g_tilde;
  }
  return out;
}

PolyOperator build_operator(const NodeGeometry& geo, const LayerData& d, const OperatorTerms& t) {
  const int N = geo.N, nv = N + 1, tv = N, n = N - 1;
  auto tr = [&](const Poly& p) { return p.truncate_in(tv, d.max_tau); };
  auto xi = [&](int I) { return Poly::variable(nv, I); };

  PolyOperator op;
  op.N = N;
  op.A.assign(N, std::vector<Poly>(N, Poly(nv)));
  op.B.assign(N, Poly(nv));
  op.By.assign(N, Poly(nv));
  op.C = op.Cy = op.Cyy = Poly(nv);

  auto add_sym = [&](int I, int J, const Poly& p) {
    if (p.is_zero()) return;
    const Poly q = tr(p);
    if (I == J) {
      op.A[I][I] += q;
    } else {
      op.A[I][J] += 0.5 * q;
      op.A[J][I] += 0.5 * q;
    }
  };
  auto add = [&](Poly& target, const Poly& p) { target += tr(p); };

  const Poly one = Poly::constant(nv, 1.0);
  const Poly e = Poly::variable(nv, tv, d.eps);
  const Poly e2 = e * e;
  const Poly mu = graded_poly(nv, tv, d.mu);
  const Poly dmu = graded_poly(nv, tv, d.dmu);
  const Poly ddmu = graded_poly(nv, tv, d.ddmu);
  std::vector<Poly> phi(n, Poly(nv)), dphi(n, Poly(nv)), ddphi(n, Poly(nv));
  for (int m = 0; m < n; ++m) {
    if (m < static_cast<int>(d.phi.size())) phi[m] = graded_poly(nv, tv, d.phi[m]);
    if (m < static_cast<int>(d.dphi.size())) dphi[m] = graded_poly(nv, tv, d.dphi[m]);
    if (m < static_cast<int>(d.ddphi.size())) ddphi[m] = graded_poly(nv, tv, d.ddphi[m]);
  }
  std::vector<Poly> X(n);
  for (int m = 0; m < n; ++m) X[m] = tr(mu * xi(m) + phi[m]);
  const Poly xn = xi(n);
  const double gam = (N - 2) / 2.0;
  const double igt = 1.0 / geo.g_tilde;
  const Poly mu2 = tr(mu * mu);

  if (t.tangential) add(op.Cyy, igt * (mu2 * e2));

  if (t.a0) {
    const Poly ce = igt * e2;
    const Poly dmu2 = tr(dmu * dmu);
    for (int m = 0; m < n; ++m) add(op.B[m], -1.0 * (ce * mu * ddphi[m]));
    const Poly mmdd = tr(mu * ddmu);
    add(op.C, -gam * (ce * mmdd));
    for (int I = 0; I < N; ++I) add(op.B[I], -1.0 * (ce * mmdd * xi(I)));
    for (int I = 0; I < N; ++I)
      for (int J = 0; J < N; ++J) add_sym(I, J, ce * dmu2 * xi(I) * xi(J));
    for (int I = 0; I < N; ++I) add(op.B[I], 2.0 * (1.0 + gam) * (ce * dmu2 * xi(I)));
    add(op.C, gam * (1.0 + gam) * (ce * dmu2));
    for (int m = 0; m < n; ++m) {
      if (dphi[m].is_zero()) continue;
      const Poly mp = tr(dmu * dphi[m]);
      for (int I = 0; I < N; ++I) add_sym(I, m, 2.0 * (ce * mp * xi(I)));
      add(op.B[m], static_cast<double>(N) * (ce * mp));
      for (int k = 0; k < n; ++k)
        if (!dphi[k].is_zero()) add_sym(m, k, ce * dphi[m] * dphi[k]);
    }
    // mixed y and xi derivatives: d_z = eps d_y
    const Poly mmd = tr(mu * dmu);
    for (int I = 0; I < N; ++I) add(op.By[I], -2.0 * (ce * mmd * xi(I)));
    for (int m = 0; m < n; ++m) add(op.By[m], -2.0 * (ce * mu * dphi[m]));
    add(op.Cy, -2.0 * gam * (ce * mmd));
  }

  if (t.a1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Poly c(nv);
        const double h = geo.H(i + 1, j + 1);
        if (h != 0.0) c += (2.0 * h) * (mu * e * xn);
        Poly rr(nv);
        for (int m = 0; m < n; ++m)
          for (int l = 0; l < n; ++l) {
            const double r = geo.riemann(m + 1, i + 1, j + 1, l + 1);
            if (r != 0.0) rr += r * (X[m] * X[l]);
          }
        if (!rr.is_zero()) c += (-1.0 / 3.0) * (e2 * rr);
        const double h2 = geo.H2(i + 1, j + 1);
        if (h2 != 0.0) c += (3.0 * h2) * (mu2 * e2 * xn * xn);
        Poly dd(nv);
        for (int l = 0; l < n; ++l) {
          const double f = geo.frak_normal[(static_cast<std::size_t>(i) * n + j) * n + l];
          if (f != 0.0) dd += f * X[l];
        }
        if (!dd.is_zero()) c += mu * e2 * xn * dd;
        add_sym(i, j, c);
      }
  }

  if (t.a2) {
    for (int j = 0; j < n; ++j) {
      Poly c(nv);
      for (int m = 0; m < n; ++m) {
        double k = 0.0;
        for (int s = 1; s < N; ++s) k += (2.0 / 3.0) * geo.riemann(m + 1, s, s, j + 1);
        k += geo.riemann(m + 1, 0, 0, j + 1) * igt - geo.Gamma(m + 1) * geo.Gamma(j + 1);
        if (k != 0.0) c += k * X[m];
      }
      if (!c.is_zero()) add(op.B[j], e2 * mu * c);
    }
  }

  if (t.a3) {
    const double trH = geo.H.trace(), trH2 = geo.H2.trace();
    Poly c = (-trH) * e;
    c += (-2.0 * trH2) * (mu * e2 * xn);
    for (int i = 0; i < n; ++i) {
      const double k = geo.H(0, 0) * geo.Gamma(i + 1);
      if (k != 0.0) c += (-2.0 * k) * (e2 * X[i]);
    }
    add(op.B[n], mu * c);
  }

  if (t.a4) {
    for (int j = 0; j < n; ++j) {
      const double h = geo.H(0, j + 1);
      if (h == 0.0) continue;
      const Poly pre = (4.0 * h) * (e * mu * xn);
      for (int m = 0; m < n; ++m)
        if (!dphi[m].is_zero()) add_sym(m, j, -1.0 * (pre * e * dphi[m]));
      add(op.By[j], pre * mu * e);
      add(op.B[j], -gam * (pre * e * dmu));
      for (int I = 0; I < N; ++I) add_sym(I, j, -1.0 * (pre * e * dmu * xi(I)));
    }
  }

  if (t.a5) {
    Poly pref(nv);
    for (int j = 0; j < n; ++j)
      if (geo.frak_tangent(j) != 0.0) pref += geo.frak_tangent(j) * X[j];
    if (geo.frak_tangent(n) != 0.0) pref += geo.frak_tangent(n) * (mu * xn);
    if (!pref.is_zero()) {
      const Poly c = tr(e2 * pref * mu * e);
      for (int m = 0; m < n; ++m)
        if (!dphi[m].is_zero()) add(op.B[m], -1.0 * (c * dphi[m]));
      add(op.Cy, c * mu);
      add(op.C, -gam * (c * dmu));
      for (int I = 0; I < N; ++I) add(op.B[I], -1.0 * (c * dmu * xi(I)));
    }
  }
  (void)one;
  return op;
}

ChannelJet bubble_jet(const HalfspaceGrid& g) {
  ChannelJet J;
  const Eigen::MatrixXd xn = g.power(1, 1, 0);
  J.K = g.w0();
  J.Drho = g.q();
  J.DN = xn.cwiseProduct(g.q());
  J.DrhoDrho = g.s();
  J.DNDrho = xn.cwiseProduct(g.s());
  J.DNDN = g.q() + xn.cwiseProduct(xn).cwiseProduct(g.s());
  return J;
}

JetLayer bubble_layer(const HalfspaceGrid& grid) {
  JetLayer L;
  L.order = 0;
  L.value.emplace(0, bubble_jet(grid));
  return L;
}

JetLayer mode_layer(int order, const ModeFunction& w, const ModeFunction* dy, const ModeFunction* dyy) {
  JetLayer L;
  L.order = order;
  for (const auto& [ch, v] : w.channels()) L.value.emplace(ch, w.jet(ch));
  if (dy)
    for (const auto& [ch, v] : dy->channels()) L.dy.emplace(ch, dy->jet(ch));
  if (dyy)
    for (const auto& [ch, v] : dyy->channels()) L.dyy.emplace(ch, dyy->jet(ch));
  return L;
}

SymFunction apply_symbolic(const PolyOperator& op, const HalfspaceGrid& grid, const std::vector<JetLayer>& layers,
                           int min_order, int max_order) {
  const int N = op.N, tv = op.tau_var();
  if (grid.N() != N) throw ConcentraError(ErrorKind::Domain, "operator and grid dimensions differ");
  // tau parts of every coefficient
  std::vector<std::vector<std::map<int, Poly>>> A(N, std::vector<std::map<int, Poly>>(N));
  std::vector<std::map<int, Poly>> B(N), By(N);
  for (int I = 0; I < N; ++I) {
    for (int J = 0; J < N; ++J) A[I][J] = split_tau(op.A[I][J], tv, N);
    B[I] = split_tau(op.B[I], tv, N);
    By[I] = split_tau(op.By[I], tv, N);
  }
  const auto C = split_tau(op.C, tv, N), Cy = split_tau(op.Cy, tv, N), Cyy = split_tau(op.Cyy, tv, N);

  SymFunction out(std::shared_ptr<const HalfspaceGrid>(&grid, [](const HalfspaceGrid*) {}));
  for (const auto& L : layers) {
    const int lo = min_order - L.order, hi = max_order - L.order;
    if (hi < 0) continue;
    LocalCoefficients main, ydir, yy;
    main.has_a = true;
    main.A.assign(N, std::vector<Poly>(N, Poly(N)));
    main.B.assign(N, Poly(N));
    ydir.B.assign(N, Poly(N));
    yy.B.assign(N, Poly(N));
    for (int I = 0; I < N; ++I) {
      for (int J = 0; J < N; ++J) main.A[I][J] = window(A[I][J], lo, hi, N);
      main.B[I] = window(B[I], lo, hi, N);
      ydir.B[I] = window(By[I], lo, hi, N);
    }
    main.C = window(C, lo, hi, N);
    ydir.C = window(Cy, lo, hi, N);
    yy.C = window(Cyy, lo, hi, N);
    main.finish(N);
    ydir.finish(N);
    yy.finish(N);
    if (!main.empty)
      for (const auto& [ch, J] : L.value) apply_channel(main, grid, ch, J, out);
    if (!ydir.empty)
      for (const auto& [ch, J] : L.dy) apply_channel(ydir, grid, ch, J, out);
    if (!yy.empty)
      for (const auto& [ch, J] : L.dyy) apply_channel(yy, grid, ch, J, out);
  }
  return out;
}

Eigen::VectorXd SamplePlan::point(const HalfspaceGrid& grid, std::size_t p) const {
  const int nt = grid.nt();
  const std::size_t nd = dirs.size();
  const int k = static_cast<int>(p % nd);
  const std::size_t rq = p / nd;
  const int q = static_cast<int>(rq % nt);
  const int ri = static_cast<int>(rq / nt);
  const double r = grid.r(r_index[ri]);
  Eigen::VectorXd x(grid.N());
  x.head(grid.N() - 1) = r * grid.sin_theta(q) * dirs[k];
  x(grid.N() - 1) = r * grid.t(q);
  return x;
}

void PointJets::resize(int N_, std::size_t points) {
  N = N_;
  v.assign(points, 0.0);
  g.assign(points * N, 0.0);
  h.assign(points * N * N, 0.0);
}

PointJets& PointJets::operator+=(const PointJets& o) {
  if (v.empty()) return *this = o;
  if (o.v.empty()) return *this;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += o.g[i];
  for (std::size_t i = 0; i < h.size(); ++i) h[i] += o.h[i];
  return *this;
}

PointJets point_jets(const HalfspaceGrid& grid, const std::map<MonoKey, ChannelJet>& jets, const SamplePlan& plan,
                     int max_derivative) {
  const int N = grid.N(), n = N - 1, nt = grid.nt();
  const std::size_t nd = plan.dirs.size();
  PointJets out;
  out.resize(N, plan.size(nt));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  std::vector<double> ev(nd), gv(nd * n), hv(nd * n * n);
  for (const auto& [ch, J] : jets) {
    const int d = mono_degree(ch, n);
    const Poly& e = grid.basis(ch);
    const auto& grad = grid.basis_gradient(ch);
    const auto& hess = grid.basis_hessian(ch);
    for (std::size_t k = 0; k < nd; ++k) {
      x.head(n) = plan.dirs[k];
      ev[k] = e.eval(x.data());
      for (int I = 0; I < n; ++I) {
        gv[k * n + I] = d >= 1 ? grad[I].eval(x.data()) : 0.0;
        for (int Jx = 0; Jx < n; ++Jx) hv[(k * n + I) * n + Jx] = d >= 2 ? hess[I][Jx].eval(x.data()) : 0.0;
      }
    }
    for (std::size_t ri = 0; ri < plan.r_index.size(); ++ri) {
      const int i = plan.r_index[ri];
      const double r = grid.r(i);
      for (int q = 0; q < nt; ++q) {
        const double rho = r * grid.sin_theta(q), xn = r * grid.t(q);
        const double p0 = std::pow(rho, d);
        const double p1 = d >= 1 ? std::pow(rho, d - 1) : 0.0;
        const double p2 = d >= 2 ? std::pow(rho, d - 2) : 0.0;
        const double K = J.K(i, q), Dr = J.Drho(i, q), DN = J.DN(i, q);
        const double Drr = J.DrhoDrho(i, q), DNr = J.DNDrho(i, q), DNN = J.DNDN(i, q);
        for (std::size_t k = 0; k < nd; ++k) {
          const std::size_t p = (ri * nt + q) * nd + k;
          const double E = p0 * ev[k];
          const double* gw = &gv[k * n];
          const double* hw = &hv[k * n * n];
          const double* w = plan.dirs[k].data();
          double* G = &out.g[p * N];
          double* Hm = &out.h[p * N * N];
          out.v[p] += E * K;
          if (max_derivative < 1) continue;
          if (max_derivative < 2) {
            for (int I = 0; I < n; ++I) G[I] += p1 * gw[I] * K + E * rho * w[I] * Dr;
            G[n] += E * DN;
            continue;
          }
          for (int I = 0; I < n; ++I) {
            const double gI = p1 * gw[I], xI = rho * w[I];
            G[I] += gI * K + E * xI * Dr;
            Hm[I * N + n] += gI * DN + E * xI * DNr;
            for (int Jx = I; Jx < n; ++Jx) {
              const double xJ = rho * w[Jx];
              double val = p2 * hw[I * n + Jx] * K + (gI * xJ + p1 * gw[Jx] * xI) * Dr + E * xI * xJ * Drr;
              if (I == Jx) val += E * Dr;
              Hm[I * N + Jx] += val;
            }
          }
          G[n] += E * DN;
          Hm[n * N + n] += E * DNN;
          (void)xn;
        }
      }
    }
  }
  // symmetric completion
  const std::size_t P = out.v.size();
  for (std::size_t p = 0; p < P; ++p) {
    double* Hm = &out.h[p * N * N];
    for (int I = 0; I < N; ++I)
      for (int Jx = 0; Jx < I; ++Jx) Hm[I * N + Jx] = Hm[Jx * N + I];
  }
  return out;
}

std::vector<double> apply_pointwise(const PolyOperator& op, const HalfspaceGrid& grid, const SamplePlan& plan,
                                    const PointJets& W, const PointJets& Wy, const PointJets& Wyy) {
  const int N = op.N, tv = op.tau_var();
  const std::size_t P = plan.size(grid.nt());
  const bool hy = !Wy.v.empty(), hyy = !Wyy.v.empty();
  const MonoKey tau_mask = ~(static_cast<MonoKey>(0xF) << (kBits * tv));

  // every coefficient term as (slot, monomial index, coefficient), tau set to 1
  // slots: A_IJ at I*N+J, B_I at N^2+I, By_I at N^2+N+I, C, Cy, Cyy after that
  struct Term {
    int slot, mono;
    double c;
  };
  std::vector<Term> terms;
  std::map<MonoKey, int> monos;
  auto collect = [&](const Poly& p, int slot) {
    for (const auto& [key, c] : p.terms()) {
      const MonoKey k = key & tau_mask;
      auto it = monos.emplace(k, static_cast<int>(monos.size())).first;
      terms.push_back({slot, it->second, c});
    }
  };
  const int sB = N * N, sBy = sB + N, sC = sBy + N, nslot = sC + 3;
  for (int I = 0; I < N; ++I) {
    for (int J = 0; J < N; ++J) collect(op.A[I][J], I * N + J);
    collect(op.B[I], sB + I);
    if (hy) collect(op.By[I], sBy + I);
  }
  collect(op.C, sC);
  if (hy) collect(op.Cy, sC + 1);
  if (hyy) collect(op.Cyy, sC + 2);

  std::vector<MonoKey> keys(monos.size());
  int max_exp = 0;
  for (const auto& [k, idx] : monos) {
    keys[idx] = k;
    for (int v = 0; v < N; ++v) max_exp = std::max(max_exp, mono_exponent(k, v));
  }
  std::vector<double> out(P, 0.0), pw(static_cast<std::size_t>(N) * (max_exp + 1)), mv(keys.size()),
      slot(nslot);
  for (std::size_t p = 0; p < P; ++p) {
    const Eigen::VectorXd xi = plan.point(grid, p);
    for (int v = 0; v < N; ++v) {
      double acc = 1.0;
      for (int e = 0; e <= max_exp; ++e) {
        pw[v * (max_exp + 1) + e] = acc;
        acc *= xi(v);
      }
    }
    for (std::size_t m = 0; m < keys.size(); ++m) {
      double val = 1.0;
      for (int v = 0; v < N; ++v) {
        const int e = mono_exponent(keys[m], v);
        if (e) val *= pw[v * (max_exp + 1) + e];
      }
      mv[m] = val;
    }
    std::fill(slot.begin(), slot.end(), 0.0);
    for (const auto& t : terms) slot[t.slot] += t.c * mv[t.mono];
    double s = 0.0;
    const double* h = &W.h[p * N * N];
    for (int k = 0; k < N * N; ++k) s += slot[k] * h[k];
    for (int I = 0; I < N; ++I) {
      s += slot[sB + I] * W.g[p * N + I];
      if (hy) s += slot[sBy + I] * Wy.g[p * N + I];
    }
    s += slot[sC] * W.v[p];
    if (hy) s += slot[sC + 1] * Wy.v[p];
    if (hyy) s += slot[sC + 2] * Wyy.v[p];
    out[p] = s;
  }
  return out;
}

}  // namespace concentra
