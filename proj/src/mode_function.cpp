#include "concentra/mode_function.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "concentra/constants.hpp"
#include "concentra/errors.hpp"
#include "concentra/special.hpp"

namespace concentra {

namespace {

constexpr int kBits = 4;

// strip the xi_N exponent from a key over N variables
MonoKey split_xn(MonoKey key, int N, int& e) {
  e = mono_exponent(key, N - 1);
  return key - (static_cast<MonoKey>(e) << (kBits * (N - 1)));
}

double omega_power(MonoKey alpha, const Eigen::VectorXd& w) {
  double p = 1.0;
  for (int v = 0; v < w.size(); ++v) {
    const int e = mono_exponent(alpha, v);
    for (int k = 0; k < e; ++k) p *= w(v);
  }
  return p;
}

// quadratic extrapolation in r^2 of rows 1..3 to row 0
void fill_origin(Eigen::MatrixXd& a, const RadialGrid& g) {
  const double x1 = g.r(1) * g.r(1), x2 = g.r(2) * g.r(2), x3 = g.r(3) * g.r(3);
  const double l1 = x2 * x3 / ((x1 - x2) * (x1 - x3));
  const double l2 = x1 * x3 / ((x2 - x1) * (x2 - x3));
  const double l3 = x1 * x2 / ((x3 - x1) * (x3 - x2));
  a.row(0) = l1 * a.row(1) + l2 * a.row(2) + l3 * a.row(3);
}

}  // namespace

HalfspaceGrid::HalfspaceGrid(int N, const HalfspaceOptions& opts)
    : N_(N), opts_(opts), grid_(RadialGrid::graded(opts.h0, opts.knee, opts.r_max)) {
  if (opts.n_theta < 2) throw ConcentraError(ErrorKind::Validation, "n_theta must be at least 2");
  if (opts.order != 4 && opts.order != 6) throw ConcentraError(ErrorKind::Validation, "radial order must be 4 or 6");
  kernel_ = &shared_kernel(N);
  std::vector<double> theta;
  gauss_legendre(opts.n_theta, 0.0, M_PI / 2.0, theta, wt_);
  for (double th : theta) {
    t_.push_back(std::cos(th));
    s_.push_back(std::sin(th));
  }
  const int nr_ = nr(), nt_ = nt();
  auto prof = [&](auto fn) {
    Eigen::MatrixXd m(nr_, nt_);
    for (int i = 0; i < nr_; ++i) m.row(i).setConstant(fn(grid_.r(i)));
    return m;
  };
  w0_ = prof([&](double r) { return kernel_->w0(r); });
  q_ = prof([&](double r) { return kernel_->q(r); });
  s2_ = prof([&](double r) { return kernel_->s(r); });
  z0_ = prof([&](double r) { return kernel_->z0(r); });
  zz_ = prof([&](double r) { return kernel_->z_profile(r); });
  pot_ = prof([&](double r) { return kernel_->potential(r); });
  base_weight_.resize(nr_, nt_);
  const auto& qw = grid_.quadrature_weights();
  for (int i = 0; i < nr_; ++i)
    for (int q = 0; q < nt_; ++q)
      base_weight_(i, q) = qw[i] * std::pow(grid_.r(i), N - 1) * wt_[q] * std::pow(s_[q], N - 2);

  const int nb = N - 1;
  for (int i = 0; i < nb; ++i)
    for (double sg : {1.0, -1.0}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(nb);
      d(i) = sg;
      dirs_.push_back(d);
    }
  for (int i = 0; i < nb; ++i)
    for (int j = i + 1; j < nb; ++j)
      for (double a : {1.0, -1.0})
        for (double b : {1.0, -1.0}) {
          Eigen::VectorXd d = Eigen::VectorXd::Zero(nb);
          d(i) = a / std::sqrt(2.0);
          d(j) = b / std::sqrt(2.0);
          dirs_.push_back(d);
        }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  for (int k = 0; k < opts.random_directions; ++k) {
    Eigen::VectorXd d(nb);
    for (int i = 0; i < nb; ++i) d(i) = nd(rng);
    dirs_.push_back(d / d.norm());
  }
}

std::shared_ptr<const HalfspaceGrid> HalfspaceGrid::make(int N, const HalfspaceOptions& opts) {
  return std::make_shared<const HalfspaceGrid>(N, opts);
}

Eigen::MatrixXd HalfspaceGrid::radial_nodal(const std::vector<double>& f) const {
  if (static_cast<int>(f.size()) != nr()) throw ConcentraError(ErrorKind::Domain, "radial profile has the wrong size");
  Eigen::MatrixXd m(nr(), nt());
  for (int i = 0; i < nr(); ++i) m.row(i).setConstant(f[i]);
  return m;
}

Eigen::MatrixXd HalfspaceGrid::power(int a, int b, int c) const {
  Eigen::MatrixXd m(nr(), nt());
  for (int i = 0; i < nr(); ++i) {
    const double ra = a == 0 ? 1.0 : std::pow(grid_.r(i), a);
    for (int q = 0; q < nt(); ++q) m(i, q) = ra * std::pow(t_[q], b) * std::pow(s_[q], c);
  }
  return m;
}

double HalfspaceGrid::moment(MonoKey alpha) const {
  auto it = moments_.find(alpha);
  if (it != moments_.end()) return it->second;
  const double m = sphere_moment(alpha, N_ - 1);
  moments_[alpha] = m;
  return m;
}

double HalfspaceGrid::integrate(MonoKey alpha, const Eigen::MatrixXd& F) const {
  const double mom = moment(alpha);
  if (mom == 0.0) return 0.0;
  const int deg = mono_degree(alpha, N_ - 1);
  double s = 0.0;
  for (int q = 0; q < nt(); ++q) {
    const double sq = std::pow(s_[q], deg);
    for (int i = 0; i < nr(); ++i) {
      const double w = base_weight_(i, q);
      if (w == 0.0) continue;
      s += w * std::pow(grid_.r(i), deg) * sq * F(i, q);
    }
  }
  return mom * s;
}

const HalfspaceGrid::BasisData& HalfspaceGrid::basis_data(MonoKey channel) const {
  auto it = basis_.find(channel);
  if (it != basis_.end()) return it->second;
  const int last = N_ - 2;
  if (mono_exponent(channel, N_ - 1) != 0)
    throw ConcentraError(ErrorKind::Representation, "channel key carries a xi_N exponent");
  const int e = mono_exponent(channel, last);
  if (e > 1) throw ConcentraError(ErrorKind::Representation, "not a harmonic basis channel");
  const MonoKey beta = channel - (static_cast<MonoKey>(e) << (kBits * last));
  BasisData bd;
  bd.h = Poly(N_);
  Poly a = Poly::monomial(N_, beta, 1.0);
  Poly xl = Poly::constant(N_, 1.0);
  for (int k = 0; k < e; ++k) xl = xl * Poly::variable(N_, last);
  const Poly x2 = Poly::variable(N_, last) * Poly::variable(N_, last);
  for (int k = 0; !a.is_zero(); ++k) {
    bd.h += xl * a;
    const double f = (e + 2.0 * k + 2.0) * (e + 2.0 * k + 1.0);
    a = (-1.0 / f) * a.laplacian();
    xl = xl * x2;
  }
  bd.grad.resize(N_ - 1);
  bd.hess.assign(N_ - 1, std::vector<Poly>(N_ - 1));
  for (int i = 0; i < N_ - 1; ++i) {
    bd.grad[i] = bd.h.derivative(i);
    for (int j = 0; j < N_ - 1; ++j) bd.hess[i][j] = bd.grad[i].derivative(j);
  }
  return basis_.emplace(channel, std::move(bd)).first->second;
}

const Poly& HalfspaceGrid::basis(MonoKey channel) const { return basis_data(channel).h; }
const std::vector<Poly>& HalfspaceGrid::basis_gradient(MonoKey channel) const { return basis_data(channel).grad; }
const std::vector<std::vector<Poly>>& HalfspaceGrid::basis_hessian(MonoKey channel) const {
  return basis_data(channel).hess;
}

const std::vector<FischerPiece>& HalfspaceGrid::fischer(MonoKey alpha) const {
  auto it = fischer_.find(alpha);
  if (it != fischer_.end()) return it->second;
  const int last = N_ - 2;
  std::vector<FischerPiece> pieces;
  const auto parts = fischer_decompose(Poly::monomial(N_ - 1, alpha, 1.0));
  for (std::size_t j = 0; j < parts.size(); ++j)
    for (const auto& [key, c] : parts[j].terms()) {
      if (mono_exponent(key, last) > 1 || c == 0.0) continue;
      pieces.push_back({static_cast<int>(j), key, c});
    }
  return fischer_.emplace(alpha, std::move(pieces)).first->second;
}

const AngularTable& HalfspaceGrid::angular(int degree) const {
  auto it = angular_.find(degree);
  if (it != angular_.end()) return it->second;
  AngularTable tab;
  tab.degree = degree;
  tab.lambda = degree + (N_ - 2) / 2.0;
  const int n = nt();
  const int nmax = 2 * n - 2;
  tab.value.resize(n, n);
  tab.d1.resize(n, n);
  tab.d2.resize(n, n);
  std::vector<double> c0(nmax + 1), c1(nmax + 1), c2(nmax + 1);
  const double lam = tab.lambda;
  for (int q = 0; q < n; ++q) {
    gegenbauer_array(nmax, lam, t_[q], c0.data());
    gegenbauer_array(nmax, lam + 1.0, t_[q], c1.data());
    gegenbauer_array(nmax, lam + 2.0, t_[q], c2.data());
    for (int k = 0; k < n; ++k) {
      const int m = 2 * k;
      tab.value(q, k) = c0[m];
      tab.d1(q, k) = m >= 1 ? 2.0 * lam * c1[m - 1] : 0.0;
      tab.d2(q, k) = m >= 2 ? 4.0 * lam * (lam + 1.0) * c2[m - 2] : 0.0;
    }
  }
  tab.lu = Eigen::PartialPivLU<Eigen::MatrixXd>(tab.value);
  return angular_.emplace(degree, std::move(tab)).first->second;
}

// ---------------------------------------------------------------- SymFunction

void SymFunction::add(MonoKey alpha, const Eigen::MatrixXd& F, double c) {
  if (c == 0.0) return;
  auto it = terms_.find(alpha);
  if (it == terms_.end())
    terms_.emplace(alpha, c * F);
  else
    it->second += c * F;
}

void SymFunction::add_poly(const Poly& p, const Eigen::MatrixXd& F, double c) {
  const int N = grid_->N();
  for (const auto& [key, coef] : p.terms()) {
    int e = 0;
    const MonoKey alpha = split_xn(key, N, e);
    if (e == 0)
      add(alpha, F, c * coef);
    else
      add(alpha, F.cwiseProduct(grid_->power(e, e, 0)), c * coef);
  }
}

SymFunction& SymFunction::operator+=(const SymFunction& o) {
  if (!grid_) grid_ = o.grid_;
  for (const auto& [k, F] : o.terms_) add(k, F);
  return *this;
}

SymFunction& SymFunction::operator-=(const SymFunction& o) {
  if (!grid_) grid_ = o.grid_;
  for (const auto& [k, F] : o.terms_) add(k, F, -1.0);
  return *this;
}

SymFunction& SymFunction::operator*=(double c) {
  for (auto& [k, F] : terms_) F *= c;
  return *this;
}

SymFunction SymFunction::times(const Poly& p) const {
  SymFunction out(grid_);
  const int N = grid_->N();
  std::map<int, Eigen::MatrixXd> xn_pow;
  for (const auto& [key, coef] : p.terms()) {
    int e = 0;
    const MonoKey beta = split_xn(key, N, e);
    if (e > 0 && !xn_pow.count(e)) xn_pow[e] = grid_->power(e, e, 0);
    for (const auto& [alpha, F] : terms_) {
      if (e == 0)
        out.add(mono_mul(alpha, beta), F, coef);
      else
        out.add(mono_mul(alpha, beta), F.cwiseProduct(xn_pow[e]), coef);
    }
  }
  return out;
}

SymFunction SymFunction::times(const Eigen::MatrixXd& G) const {
  SymFunction out(grid_);
  for (const auto& [alpha, F] : terms_) out.terms_.emplace(alpha, F.cwiseProduct(G));
  return out;
}

SymFunction SymFunction::times(const SymFunction& o) const {
  SymFunction out(grid_);
  for (const auto& [a, F] : terms_)
    for (const auto& [b, G] : o.terms_) out.add(mono_mul(a, b), F.cwiseProduct(G));
  return out;
}

double SymFunction::integrate() const {
  double s = 0.0;
  for (const auto& [alpha, F] : terms_) s += grid_->integrate(alpha, F);
  return s;
}

double SymFunction::integrate_against(MonoKey beta, const Eigen::MatrixXd& G) const {
  double s = 0.0;
  for (const auto& [alpha, F] : terms_) {
    const MonoKey ab = mono_mul(alpha, beta);
    if (grid_->moment(ab) == 0.0) continue;
    s += grid_->integrate(ab, F.cwiseProduct(G));
  }
  return s;
}

int SymFunction::max_degree() const {
  int d = 0;
  for (const auto& [alpha, F] : terms_) d = std::max(d, mono_degree(alpha, grid_->nbar()));
  return d;
}

double SymFunction::max_abs() const {
  double m = 0.0;
  for (const auto& [alpha, F] : terms_) m = std::max(m, F.cwiseAbs().maxCoeff());
  return m;
}

std::vector<double> SymFunction::sample(const std::vector<Eigen::VectorXd>& dirs) const {
  const auto& g = *grid_;
  const int nr = g.nr(), nt = g.nt(), nd = static_cast<int>(dirs.size());
  std::vector<double> out(static_cast<std::size_t>(nr) * nt * nd, 0.0);
  std::vector<double> pw(nd);
  for (const auto& [alpha, F] : terms_) {
    const int deg = mono_degree(alpha, g.nbar());
    for (int k = 0; k < nd; ++k) pw[k] = omega_power(alpha, dirs[k]);
    for (int i = 0; i < nr; ++i)
      for (int q = 0; q < nt; ++q) {
        const double base = F(i, q) * std::pow(g.r(i) * g.sin_theta(q), deg);
        if (base == 0.0) continue;
        double* o = &out[(static_cast<std::size_t>(i) * nt + q) * nd];
        for (int k = 0; k < nd; ++k) o[k] += base * pw[k];
      }
  }
  return out;
}

// ---------------------------------------------------------------- ModeFunction

ModeFunction ModeFunction::from_sym(const SymFunction& f) {
  const auto& g = f.grid();
  std::map<MonoKey, Eigen::MatrixXd> nodal;
  std::map<int, Eigen::MatrixXd> rho_pow;
  for (const auto& [alpha, F] : f.terms()) {
    for (const auto& piece : g.fischer(alpha)) {
      const int j = piece.rho_power;
      if (j > 0 && !rho_pow.count(j)) rho_pow[j] = g.power(2 * j, 0, 2 * j);
      auto it = nodal.find(piece.channel);
      if (it == nodal.end()) it = nodal.emplace(piece.channel, Eigen::MatrixXd::Zero(g.nr(), g.nt())).first;
      if (j == 0)
        it->second += piece.coef * F;
      else
        it->second += piece.coef * F.cwiseProduct(rho_pow[j]);
    }
  }
  ModeFunction out(f.grid_ptr());
  for (auto& [ch, K] : nodal) {
    const auto& tab = g.angular(mono_degree(ch, g.nbar()));
    Eigen::MatrixXd modes = tab.lu.solve(K.transpose()).transpose();
    out.channels_.emplace(ch, std::move(modes));
  }
  return out;
}

Eigen::MatrixXd ModeFunction::nodal(MonoKey channel) const {
  const auto& tab = grid_->angular(mono_degree(channel, grid_->nbar()));
  return channels_.at(channel) * tab.value.transpose();
}

SymFunction ModeFunction::to_sym() const {
  SymFunction out(grid_);
  for (const auto& [ch, v] : channels_) out.add_poly(grid_->basis(ch), nodal(ch));
  return out;
}

int ModeFunction::max_degree() const {
  int d = 0;
  for (const auto& [ch, v] : channels_) d = std::max(d, mono_degree(ch, grid_->nbar()));
  return d;
}

ChannelJet ModeFunction::jet(MonoKey channel) const {
  const auto& g = *grid_;
  const auto& tab = g.angular(mono_degree(channel, g.nbar()));
  const Eigen::MatrixXd& v = channels_.at(channel);
  const int nr = g.nr(), nt = g.nt();
  const int order = g.options().order;
  Eigen::MatrixXd vr(nr, nt), vrr(nr, nt);
  std::vector<double> col(nr);
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < nr; ++i) col[i] = v(i, k);
    const auto d1 = g.radial().derivative(col, 1, order);
    const auto d2 = g.radial().second_derivative(col, 1, order);
    for (int i = 0; i < nr; ++i) {
      vr(i, k) = d1[i];
      vrr(i, k) = d2[i];
    }
  }
  const Eigen::MatrixXd CT = tab.value.transpose(), C1T = tab.d1.transpose(), C2T = tab.d2.transpose();
  ChannelJet J;
  J.K = v * CT;
  const Eigen::MatrixXd Kr = vr * CT, Krr = vrr * CT, Kt = v * C1T, Ktt = v * C2T, Krt = vr * C1T;
  J.Drho.resize(nr, nt);
  J.DN.resize(nr, nt);
  J.DrhoDrho.resize(nr, nt);
  J.DNDrho.resize(nr, nt);
  J.DNDN.resize(nr, nt);
  for (int i = 1; i < nr; ++i) {
    const double r = g.r(i), r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
    for (int q = 0; q < nt; ++q) {
      const double t = g.t(q), u = 1.0 - t * t;
      const double kr = Kr(i, q), krr = Krr(i, q), kt = Kt(i, q), ktt = Ktt(i, q), krt = Krt(i, q);
      J.Drho(i, q) = kr / r - t * kt / r2;
      J.DN(i, q) = t * kr + u * kt / r;
      J.DrhoDrho(i, q) = krr / r2 - kr / r3 - 2.0 * t * krt / r3 + 3.0 * t * kt / r4 + t * t * ktt / r4;
      J.DNDrho(i, q) = t * (krr / r - kr / r2 - t * krt / r2 + 2.0 * t * kt / r3) +
                       (u / r) * (krt / r - kt / r2 - t * ktt / r2);
      J.DNDN(i, q) = t * t * krr + t * u * (krt / r - kt / r2) +
                     (u / r) * (kr + t * krt - 2.0 * t * kt / r + u * ktt / r);
    }
  }
  // origin: K = A + P rho^2 + Q xi_N^2 + O(r^4), from v_0''(0) and v_1''(0)
  {
    const double lam = tab.lambda;
    for (int q = 0; q < nt; ++q) {
      const double b = 0.5 * vrr(0, 0);
      const double c = nt > 1 ? 0.5 * vrr(0, 1) : 0.0;
      const double P = b - c * lam;
      const double Q = P + 2.0 * c * lam * (lam + 1.0);
      J.Drho(0, q) = 2.0 * P;
      J.DN(0, q) = 0.0;
      J.DNDN(0, q) = 2.0 * Q;
    }
  }
  // these two only enter multiplied by xi-bar factors that vanish at the origin
  fill_origin(J.DrhoDrho, g.radial());
  fill_origin(J.DNDrho, g.radial());
  return J;
}

ModeFunction& ModeFunction::operator+=(const ModeFunction& o) {
  if (!grid_) grid_ = o.grid_;
  for (const auto& [ch, v] : o.channels_) {
    auto it = channels_.find(ch);
    if (it == channels_.end())
      channels_.emplace(ch, v);
    else
      it->second += v;
  }
  return *this;
}

ModeFunction& ModeFunction::operator-=(const ModeFunction& o) {
  if (!grid_) grid_ = o.grid_;
  for (const auto& [ch, v] : o.channels_) {
    auto it = channels_.find(ch);
    if (it == channels_.end())
      channels_.emplace(ch, -v);
    else
      it->second -= v;
  }
  return *this;
}

ModeFunction& ModeFunction::operator*=(double c) {
  for (auto& [ch, v] : channels_) v *= c;
  return *this;
}

SymFunction ModeFunction::derivative(int I) const {
  SymFunction out(grid_);
  const int N = grid_->N();
  for (const auto& [ch, v] : channels_) {
    const ChannelJet J = jet(ch);
    const Poly& e = grid_->basis(ch);
    if (I == N - 1) {
      out.add_poly(e, J.DN);
    } else {
      out.add_poly(grid_->basis_gradient(ch)[I], J.K);
      out.add_poly(Poly::variable(N, I) * e, J.Drho);
    }
  }
  return out;
}

SymFunction ModeFunction::second_derivative(int I, int J) const {
  SymFunction out(grid_);
  const int N = grid_->N();
  if (I > J) std::swap(I, J);
  for (const auto& [ch, v] : channels_) {
    const ChannelJet jt = jet(ch);
    const Poly& e = grid_->basis(ch);
    const auto& grad = grid_->basis_gradient(ch);
    if (J == N - 1 && I == N - 1) {
      out.add_poly(e, jt.DNDN);
    } else if (J == N - 1) {
      out.add_poly(grad[I], jt.DN);
      out.add_poly(Poly::variable(N, I) * e, jt.DNDrho);
    } else {
      const Poly xi = Poly::variable(N, I), xj = Poly::variable(N, J);
      out.add_poly(grid_->basis_hessian(ch)[I][J], jt.K);
      out.add_poly(xj * grad[I] + xi * grad[J], jt.Drho);
      if (I == J) out.add_poly(e, jt.Drho);
      out.add_poly(xi * xj * e, jt.DrhoDrho);
    }
  }
  return out;
}

SymFunction ModeFunction::laplacian() const {
  SymFunction out(grid_);
  const auto& g = *grid_;
  const Eigen::MatrixXd rho2 = g.power(2, 0, 2);
  for (const auto& [ch, v] : channels_) {
    const ChannelJet J = jet(ch);
    const int d = mono_degree(ch, g.nbar());
    out.add_poly(g.basis(ch), (2.0 * d + g.N() - 1.0) * J.Drho + rho2.cwiseProduct(J.DrhoDrho) + J.DNDN);
  }
  return out;
}

std::vector<double> ModeFunction::sample(const std::vector<Eigen::VectorXd>& dirs) const {
  const auto& g = *grid_;
  const int nr = g.nr(), nt = g.nt(), nd = static_cast<int>(dirs.size());
  std::vector<double> out(static_cast<std::size_t>(nr) * nt * nd, 0.0);
  std::vector<double> hv(nd);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.N());
  for (const auto& [ch, v] : channels_) {
    const Poly& h = g.basis(ch);
    const int d = mono_degree(ch, g.nbar());
    for (int k = 0; k < nd; ++k) {
      x.head(g.nbar()) = dirs[k];
      hv[k] = h.eval(x.data());
    }
    const Eigen::MatrixXd K = nodal(ch);
    for (int i = 0; i < nr; ++i)
      for (int q = 0; q < nt; ++q) {
        const double base = K(i, q) * std::pow(g.r(i) * g.sin_theta(q), d);
        double* o = &out[(static_cast<std::size_t>(i) * nt + q) * nd];
        for (int k = 0; k < nd; ++k) o[k] += base * hv[k];
      }
  }
  return out;
}

double ModeFunction::eval(const Eigen::VectorXd& xi) const {
  const auto& g = *grid_;
  const double r = xi.norm();
  if (r > g.radial().r_max()) return 0.0;
  const double t = r > 0 ? std::abs(xi(g.N() - 1)) / r : 1.0;
  const auto& nodes = g.radial().nodes();
  const int n = static_cast<int>(nodes.size());
  int hi = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), r) - nodes.begin());
  int lo = std::clamp(hi - 3, 0, n - 6);
  std::vector<double> xs(nodes.begin() + lo, nodes.begin() + lo + 6);
  const auto w = fd_weights(r, xs, 0)[0];
  const int nt = g.nt();
  std::vector<double> cg(2 * nt - 1);
  double val = 0.0;
  for (const auto& [ch, v] : channels_) {
    const int d = mono_degree(ch, g.nbar());
    gegenbauer_array(2 * nt - 2, d + (g.N() - 2) / 2.0, t, cg.data());
    double k_val = 0.0;
    for (int k = 0; k < nt; ++k) {
      double vk = 0.0;
      for (int j = 0; j < 6; ++j) vk += w[j] * v(lo + j, k);
      k_val += vk * cg[2 * k];
    }
    val += g.basis(ch).eval(xi.data()) * k_val;
  }
  return val;
}

double ModeFunction::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [ch, v] : channels_) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace concentra
