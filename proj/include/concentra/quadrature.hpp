#ifndef CONCENTRA_QUADRATURE_HPP
#define CONCENTRA_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "concentra/poly.hpp"

namespace concentra {

struct QuadOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  double r_cut = 1e3;
  std::size_t limit = 4000;
};

// coef * xi^mono * radial(|xi|); variables 0..N-2 are xi-bar, N-1 is xi_N.
// decay: |term| ~ |xi|^{-decay} at infinity (whole term, monomial included).
struct RadialTerm {
  double coef = 1.0;
  MonoKey mono = 0;
  std::function<double(double)> radial;
  double decay = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// integral over the half-sphere {theta_N > 0} of S^{N-1}
double half_sphere_moment(MonoKey key, int N);

// integral over R^N_+ of the sum of terms
QuadResult quad_halfspace(int N, const std::vector<RadialTerm>& terms, const QuadOptions& opts = {});

// integral over [0, inf) of r^power f(r), f ~ r^{-decay}
QuadResult radial_integral(const std::function<double(double)>& f, int power, double decay,
                           const QuadOptions& opts = {});

}  // namespace concentra

#endif
