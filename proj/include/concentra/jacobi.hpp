#ifndef CONCENTRA_JACOBI_HPP
#define CONCENTRA_JACOBI_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "concentra/geometry.hpp"

namespace concentra {

// Sections of the normal bundle are stored [node x (N-1)].
class JacobiOperator {
 public:
  explicit JacobiOperator(const CurvatureData& cd, double degeneracy_threshold = 1e-8);

  const CurvatureData& curvature() const { return cd_; }
  const Eigen::MatrixXd& potential(int node) const { return potential_[node]; }
  int components() const { return cd_.N - 1; }

  // -Phi'' / g~ + R Phi
  Eigen::MatrixXd apply(const Eigen::MatrixXd& phi) const;
  // throws DegeneracyError when sigma_min < threshold * sigma_max
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs, double tol = 1e-8) const;

  Eigen::MatrixXd dense_matrix() const;
  // sorted eigenvalues of the discretized operator (symmetrized)
  Eigen::VectorXd spectrum() const;
  double sigma_ratio() const;

 private:
  struct Factor;
  const Factor& factor() const;

  CurvatureData cd_;
  double threshold_;
  std::vector<Eigen::MatrixXd> potential_;
  mutable std::shared_ptr<const Factor> factor_;
};

double jacobi_inner(const CurvatureData& cd, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace concentra

#endif
