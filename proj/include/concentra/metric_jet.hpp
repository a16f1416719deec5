#ifndef CONCENTRA_METRIC_JET_HPP
#define CONCENTRA_METRIC_JET_HPP

#include <Eigen/Dense>
#include <vector>

#include "concentra/geometry.hpp"
#include "concentra/poly.hpp"

namespace concentra {

using PolyMatrix = std::vector<std::vector<Poly>>;

// Second-order jet of the scaled metric at one node of K.
// Polynomial variables: 0..N-2 are X_1..X_{N-1}, N-1 is X_N, N is eps.
// Matrix index 0 is the tangent direction, 1..N-1 the normals in the boundary, N the inner normal.
struct MetricJet {
  int N = 0;
  PolyMatrix metric;
  PolyMatrix inverse;
  Poly sqrt_det;          // series of sqrt(det g), truncated at eps^2
  Poly log_det;           // log det g - log g~, truncated at eps^2
  Poly sqrt_det_printed;  // closed form with -X_N^2 tr(H^2) as the X_N^2 coefficient
  Poly log_det_printed;
  int truncation_order = 2;

  int nvars() const { return N + 1; }
  int eps_var() const { return N; }
  int x_var(int frame_index) const { return frame_index - 1; }  // frame_index in 1..N-1
  int xn_var() const { return N - 1; }

  // X has N entries (X_1..X_{N-1}, X_N)
  Eigen::MatrixXd eval_metric(const Eigen::VectorXd& X, double eps) const;
  Eigen::MatrixXd eval_inverse(const Eigen::VectorXd& X, double eps) const;
  double eval(const Poly& p, const Eigen::VectorXd& X, double eps) const;
};

MetricJet metric_jet(const CurvatureData& cd, int node);

PolyMatrix poly_matmul(const PolyMatrix& a, const PolyMatrix& b, int trunc_var, int max_power);

}  // namespace concentra

#endif
