#ifndef CONCENTRA_SPECTRUM_HPP
#define CONCENTRA_SPECTRUM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "concentra/constants.hpp"
#include "concentra/geometry.hpp"
#include "concentra/jacobi.hpp"
#include "concentra/mode_function.hpp"

namespace concentra {

// Leading quadratic forms on periodic fields over K (trapezoid rule, spectral derivatives).
struct ReducedForms {
  CurvatureData cd;
  double eps = 0.0;
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0, lambda0 = 0.0;
  std::vector<std::string> excluded;  // terms left out of the leading forms

  // (A/2) eps^2 int |delta'|^2 + (B/2) eps int delta^2
  double P(const Eigen::VectorXd& delta) const;
  // (C eps^2 / 2) [int |d'|^2 + int R_ml d^m d^l], d stored nodes x (N-1)
  double Q(const Eigen::MatrixXd& d) const;
  // (D/2) [eps^2 int |e'|^2 - lambda0 int e^2]
  double R(const Eigen::VectorXd& e) const;
};

ReducedForms reduced_forms(const CurvatureData& cd, const ConstantsTable& ct, double eps);

// Fourier-diagonal leading R-operator D(sigma k_m^2 - lambda0), k_m = 2 pi m / (L sqrt(g~)).
struct ReducedSpectrum {
  double D = 0.5;
  double lambda0 = 0.0;
  double L = 2.0 * M_PI;
  double g_tilde = 1.0;

  double wavenumber2(int m) const;
  double eigenvalue(int m, double sigma) const { return D * (sigma * wavenumber2(m) - lambda0); }
  // sorted lambda_1..lambda_J with multiplicity (m = 0 once, m >= 1 twice)
  Eigen::VectorXd eigenvalues(double sigma, int J) const;
  // largest m whose eigenvalue can be <= 0 for sigma >= sigma_min
  int max_mode(double sigma_min) const;
  // sigma at which mode m crosses zero
  double crossing(int m) const { return lambda0 / wavenumber2(m); }
};

ReducedSpectrum reduced_spectrum(const ReducedForms& forms);
ReducedSpectrum reduced_spectrum(const CurvatureData& cd, const ConstantsTable& ct);

// lambda_1..lambda_J at eps (sigma = eps^2)
Eigen::VectorXd reduced_eigenvalues(const ReducedForms& forms, double eps, int J);

// number of m in Z with (2 pi m / L)^2 <= a / sigma
long weyl_count(double sigma, double a_const, double L);

struct Crossing {
  int mode = 0;
  int multiplicity = 0;
  double sigma = 0.0;
};

struct GapResult {
  int level = 0;
  double sigma_lo = 0.0, sigma_hi = 0.0;  // level window
  std::vector<Crossing> crossings;
  int crossing_count = 0;  // with multiplicity
  double gap_lo = 0.0, gap_hi = 0.0;
  double gap_width = 0.0;
  double sigma_l = 0.0, eps_l = 0.0;
  double certified_gap = 0.0;  // min_j |lambda_j(sigma_l)|
  double c_observed = 0.0;     // certified_gap / eps_l
  bool meets_target = false;
  int grid_points = 0;
};

// Zero crossings on a grid_points sigma grid of (2^{-(l+1)}, 2^{-l}), refined by bisection; widest crossing-free
// subinterval; midpoint as sigma_l. ResolutionError when the widest gap is below the grid step.
GapResult find_gap_epsilon(const ReducedSpectrum& spec, int level, double c_target, int grid_points = 4096);

struct Dep2Report {
  double gamma_minus = 0.0, gamma_plus = 0.0;
  int pairs = 0;
  int violations = 0;
  bool pass = false;
};
// sandwich inequality over pairs sigma_2/2 < sigma_1 < sigma_2 in the window of `level`, for modes 0..max_mode
Dep2Report dep2_check(const ReducedSpectrum& spec, int level, int samples = 64);

// Level-by-level resonance checks over a range of dyadic levels.
struct GapSuite {
  std::vector<GapResult> levels;
  std::vector<Dep2Report> dep2;
  std::vector<long> weyl_bound;     // N(2^{-(l+1)}) with a = lambda0
  double count_density = 0.0;       // predicted crossings / 2^{l/2}
  double width_constant = 0.0;      // min_l gap_width 2^{3l/2}
  double width_spread = 0.0;        // min / max of gap_width 2^{3l/2}
  double c_min = 0.0;               // min_l c_observed
  double c_spread = 0.0;            // min / max of c_observed
  bool counts_ok = false, widths_ok = false, margins_ok = false, dep2_ok = false;
  bool pass() const { return counts_ok && widths_ok && margins_ok && dep2_ok; }
};
// band: acceptable min/max spread of the per-level constants
GapSuite gap_suite(const ReducedSpectrum& spec, int level_lo, int level_hi, double c_target, double band = 0.1,
                   int grid_points = 4096);

struct CourantFischerReport {
  int dimension = 0;
  double max_violation = 0.0;   // max over k of (exact_k - ritz_k) with a random subspace; <= 0 expected
  double max_agreement = 0.0;   // max |ritz_k - exact_k| for a subspace containing the eigenvectors
  bool pass = false;
};
CourantFischerReport courant_fischer_check(const ReducedSpectrum& spec, double eps, int grid, int dimension,
                                           std::uint64_t seed);

// phi = (1/mu)(delta Z_0 + d_j Z_j) + e Z + phi_perp at every node
struct Decomposition {
  Eigen::VectorXd delta, e;
  Eigen::MatrixXd d;  // nodes x (N-1)
  std::vector<SymFunction> phi_perp;
  double max_orthogonality = 0.0;  // max |int phi_perp Z_j| over nodes and slots
  double cross_term = 0.0;         // max |2 (delta/mu) e int Z_0 Z|
};

Decomposition decompose(const std::vector<SymFunction>& phi, const Eigen::VectorXd& mu);
std::vector<SymFunction> reconstruct(const Decomposition& dec, const Eigen::VectorXd& mu);
// kernel elements as grid functions (Z_0, Z_1..Z_{N-1}, Z)
std::vector<SymFunction> kernel_functions(const std::shared_ptr<const HalfspaceGrid>& grid);

}  // namespace concentra

#endif
