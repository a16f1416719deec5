#include "concentra/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace concentra {

namespace {
constexpr int kBits = 4;
constexpr MonoKey kMask = 0xF;
}  // namespace

int mono_exponent(MonoKey key, int var) { return static_cast<int>((key >> (kBits * var)) & kMask); }

int mono_degree(MonoKey key, int nvars) {
  int d = 0;
  for (int v = 0; v < nvars; ++v) d += mono_exponent(key, v);
  return d;
}

MonoKey mono_make(const std::vector<int>& exps) {
  if (exps.size() > 16) throw std::invalid_argument("too many polynomial variables");
  MonoKey key = 0;
  for (std::size_t v = 0; v < exps.size(); ++v) {
    if (exps[v] < 0 || exps[v] > 15) throw std::invalid_argument("monomial exponent out of range");
    key |= static_cast<MonoKey>(exps[v]) << (kBits * v);
  }
  return key;
}

MonoKey mono_mul(MonoKey a, MonoKey b) {
  MonoKey out = 0;
  for (int v = 0; v < 16; ++v) {
    const int e = mono_exponent(a, v) + mono_exponent(b, v);
    if (e > 15) throw std::overflow_error("monomial exponent overflow");
    out |= static_cast<MonoKey>(e) << (kBits * v);
  }
  return out;
}

Poly Poly::constant(int nvars, double c) {
  Poly p(nvars);
  p.add_term(0, c);
  return p;
}

Poly Poly::variable(int nvars, int var, double c) {
  Poly p(nvars);
  p.add_term(static_cast<MonoKey>(1) << (kBits * var), c);
  return p;
}

Poly Poly::monomial(int nvars, MonoKey key, double c) {
  Poly p(nvars);
  p.add_term(key, c);
  return p;
}

Poly Poly::rho2(int nvars) {
  Poly p(nvars);
  for (int v = 0; v < nvars; ++v) p.add_term(static_cast<MonoKey>(2) << (kBits * v), 1.0);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, mono_degree(k, nvars_));
  return d;
}

bool Poly::is_homogeneous() const {
  int d = -1;
  for (const auto& [k, c] : terms_) {
    const int e = mono_degree(k, nvars_);
    if (d >= 0 && e != d) return false;
    d = e;
  }
  return true;
}

void Poly::add_term(MonoKey key, double c) {
  if (c == 0.0) return;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

double Poly::coefficient(MonoKey key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? 0.0 : it->second;
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

Poly& Poly::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out(std::max(a.nvars_, b.nvars_));
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) out.add_term(mono_mul(ka, kb), ca * cb);
  return out;
}

Poly Poly::derivative(int var) const {
  Poly out(nvars_);
  const MonoKey unit = static_cast<MonoKey>(1) << (kBits * var);
  for (const auto& [k, c] : terms_) {
    const int e = mono_exponent(k, var);
    if (e == 0) continue;
    out.add_term(k - unit, c * e);
  }
  return out;
}

Poly Poly::laplacian() const {
  Poly out(nvars_);
  for (int v = 0; v < nvars_; ++v) {
    const MonoKey two = static_cast<MonoKey>(2) << (kBits * v);
    for (const auto& [k, c] : terms_) {
      const int e = mono_exponent(k, v);
      if (e < 2) continue;
      out.add_term(k - two, c * e * (e - 1));
    }
  }
  return out;
}

Poly Poly::homogeneous_part(int d) const {
  Poly out(nvars_);
  for (const auto& [k, c] : terms_)
    if (mono_degree(k, nvars_) == d) out.add_term(k, c);
  return out;
}

Poly Poly::truncate_in(int var, int max_power) const {
  Poly out(nvars_);
  for (const auto& [k, c] : terms_)
    if (mono_exponent(k, var) <= max_power) out.add_term(k, c);
  return out;
}

Poly Poly::pruned(double tol) const {
  Poly out(nvars_);
  for (const auto& [k, c] : terms_)
    if (std::abs(c) > tol) out.add_term(k, c);
  return out;
}

double Poly::eval(const double* x) const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) {
    double m = c;
    for (int v = 0; v < nvars_; ++v) {
      const int e = mono_exponent(k, v);
      for (int j = 0; j < e; ++j) m *= x[v];
    }
    s += m;
  }
  return s;
}

double Poly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

namespace {

// Splits homogeneous p of degree d as H(p) + rho^2 * rest.
void harmonic_split(const Poly& p, Poly& harmonic, Poly& rest) {
  const int n = p.nvars();
  const int d = p.degree();
  harmonic = p;
  rest = Poly(n);
  if (d < 2) return;
  const Poly r2 = Poly::rho2(n);
  Poly lap_k = p;
  Poly r2_pow = Poly::constant(n, 1.0);  // rho^{2(k-1)}
  double a = 1.0;
  for (int k = 1; 2 * k <= d; ++k) {
    lap_k = lap_k.laplacian();
    if (lap_k.is_zero()) break;
    a = -a / (2.0 * k * (n + 2.0 * d - 2.0 * k - 2.0));
    const Poly term = r2_pow * lap_k;
    rest += term * (-a);
    r2_pow = r2_pow * r2;
  }
  harmonic = p - r2 * rest;
}

}  // namespace

Poly harmonic_projection(const Poly& p) {
  Poly h, rest;
  harmonic_split(p, h, rest);
  return h;
}

std::vector<Poly> fischer_decompose(const Poly& p) {
  if (!p.is_homogeneous()) throw std::invalid_argument("fischer_decompose needs a homogeneous polynomial");
  std::vector<Poly> parts;
  Poly current = p;
  const int d = std::max(p.degree(), 0);
  for (int j = 0; 2 * j <= d; ++j) {
    Poly h, rest;
    harmonic_split(current, h, rest);
    parts.push_back(h);
    current = rest;
    if (current.is_zero()) break;
  }
  return parts;
}

double sphere_moment(MonoKey key, int nvars) {
  double num = 0.0;
  int total = 0;
  for (int v = 0; v < nvars; ++v) {
    const int e = mono_exponent(key, v);
    if (e % 2) return 0.0;
    num += std::lgamma((e + 1) / 2.0);
    total += e;
  }
  return 2.0 * std::exp(num - std::lgamma((total + nvars) / 2.0));
}

double sphere_inner(const Poly& a, const Poly& b) {
  const int n = std::max(a.nvars(), b.nvars());
  double s = 0.0;
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) s += ca * cb * sphere_moment(mono_mul(ka, kb), n);
  return s;
}

}  // namespace concentra
