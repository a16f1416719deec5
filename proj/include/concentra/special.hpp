#ifndef CONCENTRA_SPECIAL_HPP
#define CONCENTRA_SPECIAL_HPP

#include <vector>

namespace concentra {

struct DimensionParams {
  int N = 7;
  int k = 1;
  double p = 0.0;
  double alpha_N = 0.0;
  double half_nm2 = 0.0;

  // throws ConcentraError(Validation) unless N >= 7
  static DimensionParams make(int N);
};

double sphere_area(int dim);  // |S^{dim-1}|

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

// C_0^lambda(x) .. C_nmax^lambda(x)
void gegenbauer_array(int nmax, double lambda, double x, double* out);

// Finite-difference weights (Fornberg). weights[m][j] for derivative order m at x0.
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x, int max_order);

// d/dr log( r^{-(dim-2)/2} K_nu(kappa r) ), nu = degree + (dim-2)/2.
double bessel_tail_log_derivative(int dim, int degree, double kappa, double r);

}  // namespace concentra

#endif
