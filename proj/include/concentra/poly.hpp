#ifndef CONCENTRA_POLY_HPP
#define CONCENTRA_POLY_HPP

#include <cstdint>
#include <map>
#include <vector>

namespace concentra {

// Exponent vector packed four bits per variable (at most 16 variables, exponent <= 15).
using MonoKey = std::uint64_t;

int mono_exponent(MonoKey key, int var);
int mono_degree(MonoKey key, int nvars);
MonoKey mono_make(const std::vector<int>& exps);
MonoKey mono_mul(MonoKey a, MonoKey b);

// Sparse real polynomial in a fixed number of variables.
class Poly {
 public:
  Poly() = default;
  explicit Poly(int nvars) : nvars_(nvars) {}

  static Poly constant(int nvars, double c);
  static Poly variable(int nvars, int var, double c = 1.0);
  static Poly monomial(int nvars, MonoKey key, double c);
  static Poly rho2(int nvars);  // sum of squares

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  bool is_homogeneous() const;
  const std::map<MonoKey, double>& terms() const { return terms_; }

  void add_term(MonoKey key, double c);
  double coefficient(MonoKey key) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(double s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, double s) { return a *= s; }
  friend Poly operator*(double s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);

  Poly derivative(int var) const;
  Poly laplacian() const;
  Poly homogeneous_part(int d) const;
  // drops terms whose exponent in `var` exceeds max_power
  Poly truncate_in(int var, int max_power) const;
  Poly pruned(double tol) const;
  double eval(const double* x) const;
  double max_abs_coefficient() const;

 private:
  int nvars_ = 0;
  std::map<MonoKey, double> terms_;
};

// Harmonic part of a homogeneous polynomial.
Poly harmonic_projection(const Poly& p);

// p = sum_j rho^{2j} h_j with h_j harmonic homogeneous of degree deg(p) - 2j.
std::vector<Poly> fischer_decompose(const Poly& p);

// Integral of a monomial over the unit sphere S^{n-1} (n = number of variables).
double sphere_moment(MonoKey key, int nvars);

// L2(S^{n-1}) inner product of two polynomials.
double sphere_inner(const Poly& a, const Poly& b);

}  // namespace concentra

#endif
