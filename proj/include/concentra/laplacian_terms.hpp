#ifndef CONCENTRA_LAPLACIAN_TERMS_HPP
#define CONCENTRA_LAPLACIAN_TERMS_HPP

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "concentra/geometry.hpp"
#include "concentra/mode_function.hpp"
#include "concentra/poly.hpp"

namespace concentra {

// Curvature coefficients at one node of K, in the frame of CurvatureData (0 tangent, 1..N-1 normal).
struct NodeGeometry {
  int N = 0;
  double y = 0.0;
  Eigen::MatrixXd H, H2;
  std::vector<double> R;
  Eigen::VectorXd Gamma;
  double g_tilde = 1.0;
  // eps^2 X_N X_l coefficient of the inverse metric g^{ij}, i, j, l normal: index ((i-1)(N-1) + j-1)(N-1) + l-1
  std::vector<double> frak_normal;
  // tangential first-order coefficient eps^2 (sum_j frak_tangent(j-1) X_j + frak_tangent(N-1) X_N)
  Eigen::VectorXd frak_tangent;
  double riemann(int i, int j, int k, int l) const { return R[((i * N + j) * N + k) * N + l]; }
};

// Node data for every grid point; the frak coefficients come from the second-order metric jet
// and its spectral y-derivatives.
std::vector<NodeGeometry> operator_geometry(const CurvatureData& cd);

// Graded scalar sum_k c[k] tau^k, tau marking formal order.
using Graded = std::vector<double>;

struct LayerData {
  double eps = 0.0;
  int max_tau = 8;  // coefficients are truncated beyond this tau power
  Graded mu, dmu, ddmu;                   // mu and its y-derivatives
  std::vector<Graded> phi, dphi, ddphi;   // normal components 1..N-1 at index 0..N-2
};

struct OperatorTerms {
  bool tangential = true;  // mu^2 Delta_K W
  bool a0 = true, a1 = true, a2 = true, a3 = true, a4 = true, a5 = true;
};

// sum A_IJ d_IJ W + sum B_I d_I W + C W + sum By_I d_I d_y W + Cy d_y W + Cyy d_yy W.
// Coefficients are polynomials in (xi_1..xi_{N-1}, xi_N, tau); the xi_N index is N-1, tau is N.
// Delta_xi itself is not included.
struct PolyOperator {
  int N = 0;
  std::vector<std::vector<Poly>> A;
  std::vector<Poly> B, By;
  Poly C, Cy, Cyy;
  int nvars() const { return N + 1; }
  int tau_var() const { return N; }
  double max_abs_coefficient() const;
};

PolyOperator build_operator(const NodeGeometry& geo, const LayerData& data, const OperatorTerms& terms = {});

// tau-graded layer tau^order W with optional y-derivatives, as channel jets.
struct JetLayer {
  int order = 0;
  std::map<MonoKey, ChannelJet> value, dy, dyy;
};

// w0 with closed-form derivatives (channel 0)
ChannelJet bubble_jet(const HalfspaceGrid& grid);
JetLayer bubble_layer(const HalfspaceGrid& grid);
JetLayer mode_layer(int order, const ModeFunction& w, const ModeFunction* dy = nullptr,
                    const ModeFunction* dyy = nullptr);

// Operator applied to the layers, keeping the products tau^a * tau^order with min_order <= a + order <= max_order.
SymFunction apply_symbolic(const PolyOperator& op, const HalfspaceGrid& grid, const std::vector<JetLayer>& layers,
                           int min_order, int max_order);

// Sample points: radial node subset x theta nodes x directions in xi-bar.
struct SamplePlan {
  std::vector<int> r_index;
  std::vector<Eigen::VectorXd> dirs;
  std::size_t size(int nt) const { return r_index.size() * static_cast<std::size_t>(nt) * dirs.size(); }
  // point p = (ri * nt + q) * ndir + k
  Eigen::VectorXd point(const HalfspaceGrid& grid, std::size_t p) const;
};

// value, gradient (N per point) and Hessian (N*N per point) of sum_channels e K
struct PointJets {
  int N = 0;
  std::vector<double> v, g, h;
  void resize(int N_, std::size_t points);
  PointJets& operator+=(const PointJets& o);
};

// max_derivative 0: values only, 1: values and gradients, 2: everything
PointJets point_jets(const HalfspaceGrid& grid, const std::map<MonoKey, ChannelJet>& jets, const SamplePlan& plan,
                     int max_derivative = 2);

// op (tau = 1) applied at the sample points; Wy, Wyy may be empty
std::vector<double> apply_pointwise(const PolyOperator& op, const HalfspaceGrid& grid, const SamplePlan& plan,
                                    const PointJets& W, const PointJets& Wy, const PointJets& Wyy);

}  // namespace concentra

#endif
