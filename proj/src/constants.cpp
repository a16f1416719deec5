#include "concentra/constants.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace concentra {

bool IdentityReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

const IdentityCheck* IdentityReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

MonoKey mono_at(int N, std::initializer_list<std::pair<int, int>> powers) {
  std::vector<int> e(N, 0);
  for (const auto& [v, k] : powers) e[v] += k;
  return mono_make(e);
}

struct Integrals {
  const BubbleKernel& ker;
  QuadOptions opts;
  int N;

  double run(const std::vector<RadialTerm>& terms) const { return quad_halfspace(N, terms, opts).value; }

  // int xi_N |grad w0|^2 = int xi_N r^2 q^2
  double xn_grad2() const {
    std::vector<RadialTerm> t;
    for (int v = 0; v < N; ++v)
      t.push_back({1.0, mono_at(N, {{v, 2}, {N - 1, 1}}), [this](double r) { return sq(ker.q(r)); }, 2.0 * N - 3});
    return run(t);
  }
  double xn_w0_crit() const {
    const double e = 2.0 * N / (N - 2.0);
    return run({{1.0, mono_at(N, {{N - 1, 1}}), [this, e](double r) { return std::pow(ker.w0(r), e); }, 2.0 * N - 1}});
  }
  double a1() const {
    return run({{1.0, mono_at(N, {{0, 2}, {N - 1, 1}}), [this](double r) { return sq(ker.q(r)); }, 2.0 * N - 3}});
  }
  double xn_dn2() const {
    return run({{1.0, mono_at(N, {{N - 1, 3}}), [this](double r) { return sq(ker.q(r)); }, 2.0 * N - 3}});
  }
  double b() const {
    return run({{1.0, 0, [this](double r) { return sq(ker.w0(r)); }, 2.0 * N - 4}});
  }
  double w0z0() const {
    return run({{1.0, 0, [this](double r) { return ker.w0(r) * ker.z0(r); }, 2.0 * N - 4}});
  }
  double c0() const {
    return run({{1.0, mono_at(N, {{0, 2}}), [this](double r) { return sq(ker.q(r)); }, 2.0 * N - 2}});
  }
  double z0sq() const {
    return run({{1.0, 0, [this](double r) { return sq(ker.z0(r)); }, 2.0 * N - 4}});
  }
  // int xi_j d_i w0 d_ij w0, i != j
  double mixed_hess() const {
    return run({{1.0, mono_at(N, {{0, 2}, {1, 2}}), [this](double r) { return ker.q(r) * ker.s(r); }, 2.0 * N - 2}});
  }
  // int xi_N^2 d_N w0 d_NN w0
  double xn2_dn_dnn() const {
    return run({{1.0, mono_at(N, {{N - 1, 3}}), [this](double r) { return sq(ker.q(r)); }, 2.0 * N - 3},
                {1.0, mono_at(N, {{N - 1, 5}}), [this](double r) { return ker.q(r) * ker.s(r); }, 2.0 * N - 3}});
  }
  // int xi_N^2 d_N w0 d_11 w0
  double xn2_dn_d11() const {
    return run({{1.0, mono_at(N, {{N - 1, 3}}), [this](double r) { return sq(ker.q(r)); }, 2.0 * N - 3},
                {1.0, mono_at(N, {{N - 1, 3}, {0, 2}}), [this](double r) { return ker.q(r) * ker.s(r); },
                 2.0 * N - 3}});
  }
  double zsq() const {
    return run({{1.0, 0, [this](double r) { return sq(ker.z_profile(r)); }, 1e9}});
  }
  static double sq(double x) { return x * x; }
};

IdentityCheck make_check(const std::string& name, double lhs, double rhs, double tol) {
  IdentityCheck c;
  c.name = name;
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
  c.pass = c.residual <= tol;
  return c;
}

}  // namespace

IdentityReport verify_identities(const BubbleKernel& kernel, double tol, const QuadOptions& opts) {
  const int N = kernel.N();
  Integrals in{kernel, opts, N};
  const double a1 = in.a1();
  const double grad = in.xn_grad2();
  const double crit = in.xn_w0_crit();
  const double a0 = 0.5 * grad - (N - 2.0) / (2.0 * N) * crit;
  const double b = in.b();
  const double c0 = in.c0();
  IdentityReport rep;
  rep.N = N;
  rep.tol = tol;
  rep.checks.push_back(make_check("A0 = 2 A1", a0, 2.0 * a1, tol));
  rep.checks.push_back(make_check("int xi_N |grad w0|^2 = (N+1) A1", grad, (N + 1.0) * a1, tol));
  rep.checks.push_back(
      make_check("int xi_N w0^{2N/(N-2)} = N(N-3)/(N-2) A1", crit, N * (N - 3.0) / (N - 2.0) * a1, tol));
  rep.checks.push_back(make_check("int xi_N |d_N w0|^2 = 2 A1", in.xn_dn2(), 2.0 * a1, tol));
  rep.checks.push_back(make_check("int w0 Z0 = -int w0^2", in.w0z0(), -b, tol));
  rep.checks.push_back(make_check("int xi_j d_i w0 d_ij w0 = -C0/2", in.mixed_hess(), -0.5 * c0, tol));
  rep.checks.push_back(make_check("int xi_N^2 d_N w0 d_NN w0 = -2 A1", in.xn2_dn_dnn(), -2.0 * a1, tol));
  rep.checks.push_back(make_check("int xi_N^2 d_N w0 d_11 w0 = A1", in.xn2_dn_d11(), a1, tol));
  return rep;
}

ConstantsTable compute_constants(const BubbleKernel& kernel, const QuadOptions& opts) {
  const int N = kernel.N();
  Integrals in{kernel, opts, N};
  ConstantsTable t;
  t.N = N;
  t.A1_frak = in.a1();
  t.A0_frak = 0.5 * in.xn_grad2() - (N - 2.0) / (2.0 * N) * in.xn_w0_crit();
  t.B = in.b();
  t.C0 = in.c0();
  t.A = in.z0sq();
  t.C = t.C0;
  t.D = in.zsq();
  t.D_full = 2.0 * t.D;
  t.lambda0 = kernel.lambda0();
  t.lambda0_bar = t.C * t.lambda0;
  t.quad_rel_tol = opts.rel_tol;
  t.identities = verify_identities(kernel, 1e-6, opts);
  return t;
}

const ConstantsTable& bubble_constants(const BubbleKernel& kernel, const QuadOptions& opts) {
  static std::mutex mtx;
  static std::map<std::pair<int, double>, std::unique_ptr<ConstantsTable>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(kernel.N(), opts.rel_tol);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<ConstantsTable>(compute_constants(kernel, opts))).first;
  return *it->second;
}

const BubbleKernel& shared_kernel(int N) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<BubbleKernel>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, std::make_unique<BubbleKernel>(N)).first;
  return *it->second;
}

}  // namespace concentra
