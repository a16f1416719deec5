#ifndef CONCENTRA_BUBBLE_HPP
#define CONCENTRA_BUBBLE_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "concentra/special.hpp"

namespace concentra {

struct EigenOptions {
  double h = 0.01;
  double r_max = 40.0;
  double r_match = 20.0;
  int order = 6;  // residual is checked with order + 2
};

struct EigenDiagnostics {
  double lambda0 = 0.0;
  double h = 0.0;
  double residual_inf = 0.0;  // |Delta Z + p w0^{p-1} Z - lambda0 Z| with a higher-order stencil
  int iterations = 0;
  double tail_coefficient = 0.0;
};

// The bubble w0, its derivatives, the kernel Z_0..Z_{N-1} and the eigenpair (lambda0, Z).
class BubbleKernel {
 public:
  explicit BubbleKernel(int N, const EigenOptions& opts = {});

  const DimensionParams& dims() const { return dims_; }
  int N() const { return dims_.N; }

  // radial profiles
  double w0(double r) const;
  double q(double r) const;   // grad w0 = xi q(r)
  double s(double r) const;   // hess w0 = delta q + xi xi^T s(r)
  double z0(double r) const;  // r^2 q + gamma w0
  double potential(double r) const;  // p w0^{p-1}
  double lambda0() const;
  double z_profile(double r) const;
  const EigenDiagnostics& eigen_diagnostics() const;
  const std::vector<double>& z_nodes() const;
  double z_grid_step() const;

  double eval_bubble(const Eigen::VectorXd& xi, double mu) const;
  // j = 0: xi . grad w0 + gamma w0; j >= 1: d w0 / d xi_j (1-based coordinate)
  double eval_kernel(int j, const Eigen::VectorXd& xi) const;
  Eigen::VectorXd eval_grad(const Eigen::VectorXd& xi) const;
  Eigen::MatrixXd eval_hess(const Eigen::VectorXd& xi) const;

 private:
  struct EigenData;
  DimensionParams dims_;
  std::shared_ptr<const EigenData> eig_;
};

}  // namespace concentra

#endif
