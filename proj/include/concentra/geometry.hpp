#ifndef CONCENTRA_GEOMETRY_HPP
#define CONCENTRA_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "concentra/periodic.hpp"

namespace concentra {

// Periodic curvature data along a closed curve K in the boundary (k = 1).
// Frame indices: 0 is the unit tangent of K, 1..N-1 the normals of K inside the boundary.
// The shape operator uses the inner normal, so the unit ball has H = Id.
struct CurvatureData {
  std::string name;
  int N = 0;  // boundary dimension, ambient n = N + 1
  double L = 0.0;
  PeriodicGrid grid;
  std::vector<Eigen::MatrixXd> H;       // N x N per node
  std::vector<std::vector<double>> R;   // N^4 per node, R[((i*N+j)*N+k)*N+l]
  std::vector<Eigen::VectorXd> Gamma;   // Gamma^0_{0i}, entry 0 unused
  Eigen::VectorXd g_tilde;

  int n() const { return N + 1; }
  int k() const { return 1; }
  int size() const { return grid.size(); }
  double y(int node) const { return grid.y(node); }
  double riemann(int node, int i, int j, int k, int l) const {
    return R[node][((i * N + j) * N + k) * N + l];
  }
  // (H^2)_{ab} = H_{ai}H_{ib} + g~ H_{a0}H_{b0}
  Eigen::MatrixXd H2(int node) const;
  // Jacobi potential R_{m00l}/g~ - Gamma_m Gamma_l on normal indices (N-1 x N-1)
  Eigen::MatrixXd jacobi_potential(int node) const;
  // node-major field of one entry, for spectral derivatives
  Eigen::VectorXd field_H(int a, int b) const;
};

// Checks symmetry of H, antisymmetry of R in its first index pair, g~ > 0, finiteness.
void validate(const CurvatureData& cd, double tol = 1e-12);

// R_{ijkl} = H_ik H_jl - H_il H_jk on the full frame.
std::vector<double> gauss_curvature_tensor(const Eigen::MatrixXd& H);

CurvatureData round_sphere(int n, int grid = 128);
// ellipsoid x1^2 + x2^2 + (x3^2 + ... + xn^2)/aspect^2 = 1, K the unit circle in the (x1, x2) plane
CurvatureData spheroid_equator(int n, double aspect, int grid = 128);
CurvatureData flat_geometry(int n, double L = 2.0 * M_PI, int grid = 128);
// round sphere with H = Id + amp P(y), curvature tensor from the Gauss equation
CurvatureData perturbed_sphere(int n, double amp, int grid = 128);

struct FourierEntry {
  std::vector<int> index;  // 2 entries for H, 4 for R, 1 for Gamma
  double constant = 0.0;
  std::vector<double> cos_coef;  // cos(2 pi m y / L), m = 1, 2, ...
  std::vector<double> sin_coef;
};

struct SyntheticSpec {
  int n = 8;
  double L = 2.0 * M_PI;
  int grid = 128;
  std::vector<FourierEntry> H;
  std::vector<FourierEntry> R;
  std::vector<FourierEntry> Gamma;
  double g_tilde = 1.0;
  bool R_from_gauss = false;  // entries in R are added on top
};

CurvatureData synthetic_geometry(const SyntheticSpec& spec);

// max over nodes and normal indices of |Gamma^0_{0i}|
double minimality_residual(const CurvatureData& cd);

// 2 H_00 + sum_{i>0} H_ii
double hbar(const CurvatureData& cd, int node);
// equivalent form 2 tr H - sum_{i>0} H_ii
double hbar_trace_form(const CurvatureData& cd, int node);
Eigen::VectorXd hbar_field(const CurvatureData& cd);
bool hbar_positive(const CurvatureData& cd);

// trigonometric resampling of every field onto a coarser (or finer) grid
CurvatureData resample(const CurvatureData& cd, int grid);

}  // namespace concentra

#endif
