#include "concentra/expansion.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "concentra/errors.hpp"

namespace concentra {

namespace {

double binomial(double p, int n) {
  double c = 1.0;
  for (int k = 0; k < n; ++k) c *= (p - k) / (k + 1);
  return c;
}

Eigen::MatrixXd spectral_matrix(const PeriodicGrid& g, int order) {
  return g.derivative_columns(Eigen::MatrixXd::Identity(g.size(), g.size()), order);
}

ModeFunction combine(const std::vector<ModeFunction>& f, const Eigen::MatrixXd& D, int row,
                     const std::shared_ptr<const HalfspaceGrid>& grid) {
  ModeFunction out(grid);
  for (int u = 0; u < D.cols(); ++u)
    if (std::abs(D(row, u)) > 1e-14) out += D(row, u) * f[u];
  return out;
}

SymFunction bubble_sym(const std::shared_ptr<const HalfspaceGrid>& grid) {
  SymFunction s(grid);
  s.add(0, grid->w0());
  return s;
}

double max_abs_block(const Eigen::MatrixXd& P, int c0, int c1) {
  double m = 0.0;
  for (int v = 0; v < P.rows(); ++v)
    for (int c = c0; c < c1; ++c) m = std::max(m, std::abs(P(v, c)));
  return m;
}

// periodic cardinal function of an even number of nodes
double cardinal(int M, double L, double dy) {
  const double x = 2.0 * M_PI * dy / L;
  const double sx = std::sin(x / 2.0);
  if (std::abs(sx) < 1e-14) return 1.0;
  return std::sin(M * x / 2.0) * std::cos(x / 2.0) / (M * sx);
}

}  // namespace

Eigen::VectorXd mu0_field(const CurvatureData& cd, const ConstantsTable& ct) {
  Eigen::VectorXd mu(cd.size());
  for (int v = 0; v < cd.size(); ++v) {
    mu(v) = ct.A1_frak * hbar(cd, v) / ct.B;
    if (!(mu(v) > 0.0))
      throw PositivityError(cd.y(v), mu(v), "mu0 is not positive: weighted curvature average hbar <= 0 on K");
  }
  return mu;
}

std::vector<RadialTerm> g1_terms(const Eigen::MatrixXd& H, double mu0, const BubbleKernel& kernel) {
  const int N = kernel.N();
  const BubbleKernel* k = &kernel;
  auto q = [k](double r) { return k->q(r); };
  auto s = [k](double r) { return k->s(r); };
  auto w0 = [k](double r) { return k->w0(r); };
  std::vector<RadialTerm> out;
  std::vector<int> e(N, 0);
  auto key = [&](int a, int b, int c) {
    std::fill(e.begin(), e.end(), 0);
    if (a >= 0) ++e[a];
    if (b >= 0) ++e[b];
    if (c >= 0) ++e[c];
    return mono_make(e);
  };
  const int xn = N - 1;
  double trn = 0.0;
  for (int i = 1; i < N; ++i) trn += H(i, i);
  // -trH xi_N q
  out.push_back({-mu0 * H.trace(), key(xn, -1, -1), q, static_cast<double>(N - 1)});
  // 2 xi_N H_ij (delta_ij q + xi_i xi_j s)
  out.push_back({2.0 * mu0 * trn, key(xn, -1, -1), q, static_cast<double>(N - 1)});
  for (int i = 1; i < N; ++i)
    for (int j = 1; j < N; ++j)
      if (H(i, j) != 0.0) out.push_back({2.0 * mu0 * H(i, j), key(xn, i - 1, j - 1), s, static_cast<double>(N - 1)});
  out.push_back({-mu0 * mu0, 0, w0, static_cast<double>(N - 2)});
  return out;
}

SymFunction g1_sym(const std::shared_ptr<const HalfspaceGrid>& grid, const Eigen::MatrixXd& H, double mu0) {
  const int N = grid->N();
  SymFunction out(grid);
  const Poly xn = Poly::variable(N, N - 1);
  double trn = 0.0;
  for (int i = 1; i < N; ++i) trn += H(i, i);
  out.add_poly((-mu0 * H.trace() + 2.0 * mu0 * trn) * xn, grid->q());
  Poly quad(N);
  for (int i = 1; i < N; ++i)
    for (int j = 1; j < N; ++j)
      if (H(i, j) != 0.0) quad += (2.0 * mu0 * H(i, j)) * (xn * Poly::variable(N, i - 1) * Poly::variable(N, j - 1));
  out.add_poly(quad, grid->s());
  out.add(0, grid->w0(), -mu0 * mu0);
  return out;
}

Eigen::VectorXd g1_projection(const Eigen::MatrixXd& H, double mu0, const BubbleKernel& kernel,
                              const QuadOptions& opts) {
  const int N = kernel.N();
  const auto terms = g1_terms(H, mu0, kernel);
  const BubbleKernel* k = &kernel;
  Eigen::VectorXd out(N);
  for (int j = 0; j < N; ++j) {
    std::vector<RadialTerm> prod;
    for (const auto& t : terms) {
      RadialTerm p = t;
      if (j == 0) {
        p.radial = [f = t.radial, k](double r) { return f(r) * k->z0(r); };
        p.decay = t.decay + (N - 2);
      } else {
        std::vector<int> e(N, 0);
        e[j - 1] = 1;
        p.mono = mono_mul(t.mono, mono_make(e));
        p.radial = [f = t.radial, k](double r) { return f(r) * k->q(r); };
        p.decay = t.decay + (N - 1);
      }
      prod.push_back(std::move(p));
    }
    out(j) = quad_halfspace(N, prod, opts).value;
  }
  return out;
}

Eigen::VectorXd ExpansionState::mu_total() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(nodes());
  for (const auto& f : mu) m += f;
  return m;
}

Eigen::MatrixXd ExpansionState::phi_total() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nodes(), N - 1);
  for (const auto& f : phi) m += f;
  return m;
}

LayerData ExpansionState::layer_data(int node, int max_tau) const {
  LayerData d;
  d.eps = eps;
  d.max_tau = max_tau;
  const int M = static_cast<int>(mu.size());
  d.mu.assign(M, 0.0);
  d.dmu.assign(M, 0.0);
  d.ddmu.assign(M, 0.0);
  for (int i = 0; i < M; ++i) {
    d.mu[i] = mu[i](node);
    d.dmu[i] = cd.grid.derivative(mu[i], 1)(node);
    d.ddmu[i] = cd.grid.derivative(mu[i], 2)(node);
  }
  const int P = static_cast<int>(phi.size());
  d.phi.assign(N - 1, Graded(P, 0.0));
  d.dphi = d.phi;
  d.ddphi = d.phi;
  for (int i = 0; i < P; ++i) {
    const Eigen::MatrixXd d1 = cd.grid.derivative_columns(phi[i], 1);
    const Eigen::MatrixXd d2 = cd.grid.derivative_columns(phi[i], 2);
    for (int m = 0; m < N - 1; ++m) {
      d.phi[m][i] = phi[i](node, m);
      d.dphi[m][i] = d1(node, m);
      d.ddphi[m][i] = d2(node, m);
    }
  }
  return d;
}

ExpansionState init_expansion(const CurvatureData& cd, const ConstantsTable& ct, double eps,
                              const ExpansionOptions& opts) {
  if (!(eps > 0.0)) throw ConcentraError(ErrorKind::Domain, "eps must be positive");
  if (opts.order < 0 || opts.order > 3) throw ConcentraError(ErrorKind::Domain, "expansion order must be in 0..3");
  if (opts.y_nodes < 4 || opts.y_nodes % 2) throw ConcentraError(ErrorKind::Domain, "y_nodes must be even and >= 4");
  if (ct.N != cd.N) throw ConcentraError(ErrorKind::Domain, "constants and geometry dimensions differ");
  ExpansionState s;
  s.N = cd.N;
  s.order = opts.order;
  s.eps = eps;
  s.options = opts;
  s.options.norm.eps = eps;
  s.cd = resample(cd, opts.y_nodes);
  s.grid = HalfspaceGrid::make(cd.N, opts.halfspace);
  s.geometry = operator_geometry(s.cd);
  s.C0 = ct.C0;
  s.B = ct.B;
  s.mu.push_back(mu0_field(s.cd, ct));
  return s;
}

SymFunction stage_remainder(const ExpansionState& s, int i, int node) {
  const int M = s.nodes();
  const double p = s.grid->kernel().dims().p;
  const LayerData data = s.layer_data(node, i + 1);
  const PolyOperator op = build_operator(s.geometry[node], data, s.options.terms);

  std::vector<JetLayer> layers;
  layers.push_back(bubble_layer(*s.grid));
  const Eigen::MatrixXd D1 = spectral_matrix(s.cd.grid, 1), D2 = spectral_matrix(s.cd.grid, 2);
  (void)M;
  for (int k = 1; k <= i; ++k) {
    const auto& wk = s.w[k - 1];
    const ModeFunction dy = combine(wk, D1, node, s.grid), dyy = combine(wk, D2, node, s.grid);
    layers.push_back(mode_layer(k, wk[node], &dy, &dyy));
  }
  SymFunction R = apply_symbolic(op, *s.grid, layers, i + 1, i + 1);

  auto w_sym = [&](int k) { return k == 0 ? bubble_sym(s.grid) : s.w[k - 1][node].to_sym(); };
  auto mu_at = [&](int a) { return a < static_cast<int>(s.mu.size()) ? s.mu[a](node) : 0.0; };
  // -eps mu^2 W
  for (int k = 0; k <= i; ++k) {
    double c = 0.0;
    for (int a = 0; a <= i - k; ++a) c += mu_at(a) * mu_at(i - k - a);
    if (c != 0.0) R += (-s.eps * c) * w_sym(k);
  }
  // eps mu0^2 (W - w0), the shift carried by the solver
  if (i >= 1) R += (s.eps * mu_at(0) * mu_at(0)) * w_sym(i);
  // (w0 + u)^p - w0^p - p w0^{p-1} u
  if (i >= 1) {
    // powers[n][t]: tau^t part of u^n
    std::vector<std::map<int, SymFunction>> powers(i + 2);
    for (int k = 1; k <= i; ++k) powers[1].emplace(k, w_sym(k));
    for (int n = 2; n <= i + 1; ++n) {
      for (const auto& [t1, f1] : powers[n - 1])
        for (int k = 1; k <= i; ++k) {
          const int t = t1 + k;
          if (t > i + 1) continue;
          SymFunction prod = f1.times(powers[1].at(k));
          auto it = powers[n].find(t);
          if (it == powers[n].end())
            powers[n].emplace(t, std::move(prod));
          else
            it->second += prod;
        }
      auto it = powers[n].find(i + 1);
      if (it != powers[n].end()) {
        const Eigen::MatrixXd wp = s.grid->w0().array().pow(p - n).matrix();
        R += binomial(p, n) * it->second.times(wp);
      }
    }
  }
  return R;
}

Eigen::MatrixXd stage_projections(const ExpansionState& s, int i) {
  const int M = s.nodes();
  Eigen::MatrixXd P(M, s.N + 1);
  for (int v = 0; v < M; ++v) P.row(v) = project_kernel(stage_remainder(s, i, v)).transpose();
  return P;
}

namespace {

void ensure_slots(ExpansionState& s, int i) {
  while (static_cast<int>(s.mu.size()) <= i) s.mu.push_back(Eigen::VectorXd::Zero(s.nodes()));
  while (static_cast<int>(s.phi.size()) < i) s.phi.push_back(Eigen::MatrixXd::Zero(s.nodes(), s.N - 1));
}

void apply_phi_update(ExpansionState& s, int i, const Eigen::MatrixXd& P) {
  const int M = s.nodes(), n = s.N - 1;
  Eigen::MatrixXd G(M, n);
  for (int v = 0; v < M; ++v)
    for (int m = 0; m < n; ++m) G(v, m) = -P(v, m + 1) / (s.eps * s.eps * s.mu[0](v) * s.C0);
  const JacobiOperator J(s.cd);
  s.phi[i - 1] += J.solve(G);
}

void apply_mu_update(ExpansionState& s, int i, const Eigen::MatrixXd& P) {
  for (int v = 0; v < s.nodes(); ++v) s.mu[i](v) -= P(v, 0) / (s.eps * s.mu[0](v) * s.B);
}

}  // namespace

Eigen::MatrixXd project_phi_step(ExpansionState& s, int i) {
  if (i < 1) throw ConcentraError(ErrorKind::Domain, "Phi layers start at i = 1");
  ensure_slots(s, i);
  const Eigen::MatrixXd P = stage_projections(s, i);
  apply_phi_update(s, i, P);
  return P;
}

Eigen::MatrixXd project_mu_step(ExpansionState& s, int i) {
  if (i < 1) throw ConcentraError(ErrorKind::Domain, "mu layers beyond mu0 start at i = 1");
  ensure_slots(s, i);
  const Eigen::MatrixXd P = stage_projections(s, i);
  apply_mu_update(s, i, P);
  return P;
}

void solve_layer(ExpansionState& s, int i) {
  const int M = s.nodes();
  if (static_cast<int>(s.w.size()) != i)
    throw ConcentraError(ErrorKind::Domain, "layers must be solved in order");
  SolverOptions so;
  so.norm = s.options.norm;
  std::vector<ModeFunction> layer;
  layer.reserve(M);
  std::map<double, std::shared_ptr<LinearizedSolver>> solvers;
  for (int v = 0; v < M; ++v) {
    const double a = s.mu[0](v) * s.mu[0](v);
    auto it = solvers.find(a);
    if (it == solvers.end()) it = solvers.emplace(a, std::make_shared<LinearizedSolver>(s.grid, a, s.eps, so)).first;
    try {
      layer.push_back(it->second->solve(stage_remainder(s, i, v)));
    } catch (const PreconditionError& e) {
      throw PreconditionError(e.slot(), e.projection(),
                              "layer w_" + std::to_string(i + 1) + " at y = " + std::to_string(s.cd.y(v)) + ": " +
                                  e.what());
    }
  }
  s.w.push_back(std::move(layer));
}

ExpansionState solve_order1(const CurvatureData& cd, const ConstantsTable& ct, double eps,
                            const ExpansionOptions& opts) {
  ExpansionOptions o = opts;
  o.order = 0;
  ExpansionState s = init_expansion(cd, ct, eps, o);
  StageRecord rec;
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd P = stage_projections(s, 0);
  rec.initial_z0 = rec.final_z0 = max_abs_block(P, 0, 1);
  rec.initial_zl = rec.final_zl = max_abs_block(P, 1, s.N);
  solve_layer(s, 0);
  rec.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.stages.push_back(rec);
  return s;
}

ExpansionState build_expansion(const CurvatureData& cd, const ConstantsTable& ct, double eps,
                               const ExpansionOptions& opts) {
  ExpansionState s = solve_order1(cd, ct, eps, opts);
  s.order = opts.order;
  s.options.order = opts.order;
  // Phi layers need an invertible Jacobi operator even when the Z_l slots happen to vanish
  if (opts.order >= 1) JacobiOperator(s.cd).solve(Eigen::MatrixXd::Zero(s.nodes(), s.N - 1));
  for (int i = 1; i <= opts.order; ++i) {
    ensure_slots(s, i);
    StageRecord rec;
    rec.stage = i;
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::MatrixXd P = stage_projections(s, i);
    rec.initial_z0 = max_abs_block(P, 0, 1);
    rec.initial_zl = max_abs_block(P, 1, s.N);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      const double z0 = max_abs_block(P, 0, 1), zl = max_abs_block(P, 1, s.N);
      if (z0 <= opts.projection_tol && zl <= opts.projection_tol) break;
      if (zl > opts.projection_tol) apply_phi_update(s, i, P);
      apply_mu_update(s, i, P);
      P = stage_projections(s, i);
    }
    rec.iterations = it;
    rec.final_z0 = max_abs_block(P, 0, 1);
    rec.final_zl = max_abs_block(P, 1, s.N);
    try {
      solve_layer(s, i);
    } catch (const ConcentraError&) {
      s.stages.push_back(rec);
      throw;
    }
    rec.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    s.stages.push_back(rec);
  }
  return s;
}

double layer_norm(const ExpansionState& s, int k, double r_weight) {
  if (k < 1 || k > static_cast<int>(s.w.size())) throw ConcentraError(ErrorKind::Domain, "no such layer");
  double m = 0.0;
  for (const auto& f : s.w[k - 1]) m = std::max(m, weighted_norm(f, r_weight, s.options.norm));
  return m;
}

double field_norm(const Eigen::MatrixXd& f, const PeriodicGrid& grid) {
  const Eigen::MatrixXd d1 = grid.derivative_columns(f, 1), d2 = grid.derivative_columns(f, 2);
  double m = 0.0;
  for (int v = 0; v < f.rows(); ++v)
    m = std::max(m, f.row(v).cwiseAbs().maxCoeff() + d1.row(v).cwiseAbs().maxCoeff() +
                        d2.row(v).cwiseAbs().maxCoeff());
  return m;
}

ResidualReport residual(const ExpansionState& s, const ResidualOptions& opts) {
  const int N = s.N, M = s.nodes();
  const auto& g = *s.grid;
  const double p = g.kernel().dims().p;
  ResidualReport rep;
  rep.r_weight = opts.r_weight > 0.0 ? opts.r_weight : N - 2.0;
  rep.truncation = "metric jet through eps^2; B(W) remainder of formal order eps^3 omitted";
  SamplePlan plan;
  for (int i = 0; i < g.nr(); i += std::max(1, opts.r_stride)) plan.r_index.push_back(i);
  const auto& dirs = g.directions();
  for (std::size_t k = 0; k < dirs.size(); k += std::max(1, opts.dir_stride)) plan.dirs.push_back(dirs[k]);
  const std::size_t P = plan.size(g.nt());
  const int nt = g.nt();
  const std::size_t nd = plan.dirs.size();

  const Eigen::MatrixXd D1 = spectral_matrix(s.cd.grid, 1), D2 = spectral_matrix(s.cd.grid, 2);
  std::map<MonoKey, ChannelJet> w0map;
  w0map.emplace(0, bubble_jet(g));
  const PointJets W0 = point_jets(g, w0map, plan);
  const Eigen::VectorXd mu = s.mu_total();
  const int max_tau = 15;
  const double split = s.options.norm.delta / std::sqrt(s.eps);

  rep.node_norm.assign(M, 0.0);
  for (int v = 0; v < M; ++v) {
    ModeFunction u(s.grid), uy(s.grid), uyy(s.grid);
    if (opts.include_layers)
      for (const auto& layer : s.w) {
        u += layer[v];
        uy += combine(layer, D1, v, s.grid);
        uyy += combine(layer, D2, v, s.grid);
      }
    auto jets_of = [&](const ModeFunction& f, int derivs) {
      std::map<MonoKey, ChannelJet> m;
      for (const auto& [ch, prof] : f.channels()) m.emplace(ch, f.jet(ch));
      return point_jets(g, m, plan, derivs);
    };
    PointJets U = jets_of(u, 2), Uy = jets_of(uy, 1), Uyy = jets_of(uyy, 0);
    PointJets W = W0;
    W += U;
    const PolyOperator op = build_operator(s.geometry[v], s.layer_data(v, max_tau), s.options.terms);
    const std::vector<double> AW = apply_pointwise(op, g, plan, W, Uy, Uyy);
    double inner = 0.0, outer = 0.0;
    for (std::size_t pt = 0; pt < P; ++pt) {
      const std::size_t ri = pt / (nt * nd);
      const double r = g.r(plan.r_index[ri]);
      double lap = 0.0;
      if (!U.v.empty())
        for (int I = 0; I < N; ++I) lap += U.h[(pt * N + I) * N + I];
      const double Wv = W.v[pt], w0v = W0.v[pt];
      const double nl = std::pow(std::abs(Wv), p - 1.0) * Wv - std::pow(w0v, p);
      const double E = lap + AW[pt] - s.eps * mu(v) * mu(v) * Wv + nl;
      const double val = norm_weight(r, rep.r_weight, s.options.norm) * std::abs(E);
      if (r <= split)
        inner = std::max(inner, val);
      else
        outer = std::max(outer, val);
    }
    rep.node_norm[v] = inner + outer;
    rep.inner_sup = std::max(rep.inner_sup, inner);
    rep.outer_sup = std::max(rep.outer_sup, outer);
    rep.norm = std::max(rep.norm, inner + outer);
  }
  return rep;
}

double GlobalApproximation::inner_radius() const { return 2.0 * std::pow(state->eps, -gamma); }
double GlobalApproximation::outer_radius() const { return 3.0 * std::pow(state->eps, -gamma); }

double GlobalApproximation::chi(double r) const {
  const double a = inner_radius(), b = outer_radius();
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double t = (r - a) / (b - a);
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double GlobalApproximation::chi_derivative(double r) const {
  const double a = inner_radius(), b = outer_radius();
  if (r <= a || r >= b) return 0.0;
  const double t = (r - a) / (b - a);
  return -30.0 * t * t * (1.0 - t) * (1.0 - t) / (b - a);
}

double GlobalApproximation::chi_derivative_constant() const {
  // peak of the quintic at t = 1/2 is 15/8 over the transition width eps^-gamma
  const double peak = std::abs(chi_derivative(0.5 * (inner_radius() + outer_radius())));
  return peak / std::pow(state->eps, gamma);
}

double GlobalApproximation::mu_at(double y) const {
  const auto& s = *state;
  const int M = s.nodes();
  const Eigen::VectorXd mu = s.mu_total();
  double out = 0.0;
  for (int v = 0; v < M; ++v) out += cardinal(M, s.cd.L, y - s.cd.y(v)) * mu(v);
  return out;
}

Eigen::VectorXd GlobalApproximation::phi_at(double y) const {
  const auto& s = *state;
  const int M = s.nodes();
  const Eigen::MatrixXd phi = s.phi_total();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.N - 1);
  for (int v = 0; v < M; ++v) out += cardinal(M, s.cd.L, y - s.cd.y(v)) * phi.row(v).transpose();
  return out;
}

double GlobalApproximation::eval_inner(double y, const Eigen::VectorXd& xi) const {
  const auto& s = *state;
  const int M = s.nodes();
  double out = s.grid->kernel().eval_bubble(xi, 1.0);
  for (int v = 0; v < M; ++v) {
    const double c = cardinal(M, s.cd.L, y - s.cd.y(v));
    if (std::abs(c) < 1e-15) continue;
    for (const auto& layer : s.w) out += c * layer[v].eval(xi);
  }
  return out;
}

double GlobalApproximation::eval(double y, const Eigen::VectorXd& X) const {
  const int N = state->N;
  if (X.size() != N) throw ConcentraError(ErrorKind::Domain, "X must have N components");
  Eigen::VectorXd d = X;
  d.head(N - 1) -= phi_at(y);
  const double c = chi(d.norm());
  if (c == 0.0) return 0.0;
  const double mu = mu_at(y);
  return std::pow(mu, -(N - 2) / 2.0) * eval_inner(y, d / mu) * c;
}

GlobalApproximation assemble_global(std::shared_ptr<const ExpansionState> state, double gamma) {
  if (!(gamma > 0.5 && gamma < 1.0)) throw ConcentraError(ErrorKind::Validation, "gamma must lie in (1/2, 1)");
  GlobalApproximation g;
  g.state = std::move(state);
  g.gamma = gamma;
  return g;
}

CancellationReport curvature_cancellation(const BubbleKernel& kernel, int samples, std::uint64_t seed,
                                          const QuadOptions& opts) {
  const int N = kernel.N(), n = N - 1;
  const BubbleKernel* k = &kernel;
  auto qq = [k](double r) { return k->q(r) * k->q(r); };
  auto qs = [k](double r) { return k->q(r) * k->s(r); };
  std::map<std::pair<MonoKey, int>, double> cache;
  auto integral = [&](const std::vector<int>& vars, int kind) {
    std::vector<int> e(N, 0);
    for (int v : vars) ++e[v];
    const MonoKey key = mono_make(e);
    auto it = cache.find({key, kind});
    if (it != cache.end()) return it->second;
    RadialTerm t;
    t.mono = key;
    if (kind == 0) {
      t.radial = qq;
      t.decay = 2.0 * N - 2.0;
    } else {
      t.radial = qs;
      t.decay = 2.0 * N - 2.0;
    }
    const double val = quad_halfspace(N, {t}, opts).value;
    cache.emplace(std::make_pair(key, kind), val);
    return val;
  };
  // int xi_m d_ij w0 d_l w0 = delta_ij int xi_m xi_l q^2 + int xi_m xi_i xi_j xi_l q s (frame indices 1..n)
  auto I4 = [&](int m, int i, int j, int l) {
    double v = integral({m - 1, i - 1, j - 1, l - 1}, 1);
    if (i == j) v += integral({m - 1, l - 1}, 0);
    return v;
  };
  CancellationReport rep;
  rep.samples = samples;
  rep.C0 = integral({0, 0}, 0);
  rep.mixed_integral = integral({0, 0, 1, 1}, 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> R(static_cast<std::size_t>(n) * n * n * n);
  auto at = [&](int a, int b, int c, int d) -> double& { return R[((a * n + b) * n + c) * n + d]; };
  for (int smp = 0; smp < samples; ++smp) {
    std::fill(R.begin(), R.end(), 0.0);
    for (int t = 0; t < 3; ++t) {
      Eigen::MatrixXd a(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c) a(r, c) = a(c, r) = gauss(rng);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int kk = 0; kk < n; ++kk)
            for (int l = 0; l < n; ++l) at(i, j, kk, l) += a(i, kk) * a(j, l) - a(i, l) * a(j, kk);
    }
    Eigen::VectorXd phi(n);
    for (int m = 0; m < n; ++m) phi(m) = gauss(rng);
    for (int l = 1; l <= n; ++l) {
      double total = 0.0;
      for (int m = 1; m <= n; ++m)
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j)
            for (int s = 1; s <= n; ++s) {
              const double r = at(m - 1, i - 1, j - 1, s - 1);
              if (r == 0.0) continue;
              const double term = -r / 3.0 * (phi(s - 1) * I4(m, i, j, l) + phi(m - 1) * I4(s, i, j, l));
              rep.max_term = std::max(rep.max_term, std::abs(term));
              total += term;
            }
      for (int m = 1; m <= n; ++m)
        for (int s = 1; s <= n; ++s) {
          const double term = 2.0 / 3.0 * at(m - 1, s - 1, s - 1, l - 1) * phi(m - 1) * rep.C0;
          rep.max_term = std::max(rep.max_term, std::abs(term));
          total += term;
        }
      rep.max_residual = std::max(rep.max_residual, std::abs(total));
    }
  }
  return rep;
}

double fit_exponent(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size() || eps.size() < 2)
    throw ConcentraError(ErrorKind::Domain, "exponent fit needs at least two matching points");
  const int n = static_cast<int>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(values[i] > 0.0)) throw ConcentraError(ErrorKind::Numerical, "non-positive value in fit");
    const double x = std::log(eps[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepReport expansion_sweep(const CurvatureData& cd, const ConstantsTable& ct, const std::vector<double>& eps_list,
                            const ExpansionOptions& opts, const ResidualOptions& ropts) {
  SweepReport rep;
  rep.order = opts.order;
  for (double eps : eps_list) {
    const ExpansionState s = build_expansion(cd, ct, eps, opts);
    SweepRow row;
    row.eps = eps;
    for (int k = 1; k <= opts.order + 1; ++k) row.w_norms.push_back(layer_norm(s, k, s.N - 4.0));
    for (int i = 1; i <= opts.order; ++i) {
      row.mu_norms.push_back(s.mu[i].cwiseAbs().maxCoeff());
      row.phi_norms.push_back(field_norm(s.phi[i - 1], s.cd.grid));
    }
    row.residual = residual(s, ropts).norm;
    row.mu_deviation = (s.mu_total() - s.mu[0]).cwiseAbs().maxCoeff();
    rep.rows.push_back(std::move(row));
  }
  if (eps_list.size() >= 2) {
    for (int k = 0; k <= opts.order; ++k) {
      std::vector<double> v;
      for (const auto& r : rep.rows) v.push_back(r.w_norms[k]);
      rep.w_exponents.push_back(fit_exponent(eps_list, v));
    }
    std::vector<double> v;
    for (const auto& r : rep.rows) v.push_back(r.residual);
    rep.residual_exponent = fit_exponent(eps_list, v);
  }
  return rep;
}

}  // namespace concentra
