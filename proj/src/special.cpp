#include "concentra/special.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gegenbauer.h>

#include <cmath>
#include <string>

#include "concentra/errors.hpp"

namespace concentra {

DimensionParams DimensionParams::make(int N) {
  if (N < 7) throw ConcentraError(ErrorKind::Validation, "N ≥ 7 required (got N = " + std::to_string(N) + ")");
  if (N > 15) throw ConcentraError(ErrorKind::Validation, "N ≤ 15 supported");
  DimensionParams d;
  d.N = N;
  d.k = 1;
  d.p = (N + 2.0) / (N - 2.0);
  d.alpha_N = std::pow(N * (N - 2.0), (N - 2.0) / 4.0);
  d.half_nm2 = (N - 2.0) / 2.0;
  return d;
}

double sphere_area(int dim) { return 2.0 * std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0); }

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &nodes[i], &weights[i], table);
  gsl_integration_glfixed_table_free(table);
}

void gegenbauer_array(int nmax, double lambda, double x, double* out) {
  if (nmax == 0) {
    out[0] = 1.0;
    return;
  }
  gsl_sf_gegenpoly_array(nmax, lambda, x, out);
}

std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x, int max_order) {
  const int n = static_cast<int>(x.size());
  // w[k][j]: weight of node j for derivative order k
  std::vector<std::vector<double>> w(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  w[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
        w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) w[k][j] = (c4 * w[k][j] - k * w[k - 1][j]) / c3;
      w[0][j] = c4 * w[0][j] / c3;
    }
    c1 = c2;
  }
  return w;
}

double bessel_tail_log_derivative(int dim, int degree, double kappa, double r) {
  const double nu = degree + (dim - 2) / 2.0;
  const double x = kappa * r;
  // K_nu' = -K_{nu-1} - (nu/x) K_nu, K_{-s} = K_s
  const double ratio = std::exp(gsl_sf_bessel_lnKnu(std::abs(nu - 1.0), x) - gsl_sf_bessel_lnKnu(nu, x));
  const double dlogk = kappa * (-ratio - nu / x);
  return -(dim - 2.0) / (2.0 * r) + dlogk;
}

}  // namespace concentra
