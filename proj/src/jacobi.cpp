#include "concentra/jacobi.hpp"

#include <sstream>

#include "concentra/errors.hpp"

namespace concentra {

struct JacobiOperator::Factor {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

JacobiOperator::JacobiOperator(const CurvatureData& cd, double degeneracy_threshold)
    : cd_(cd), threshold_(degeneracy_threshold) {
  for (int v = 0; v < cd.size(); ++v) potential_.push_back(cd.jacobi_potential(v));
}

Eigen::MatrixXd JacobiOperator::apply(const Eigen::MatrixXd& phi) const {
  const int M = cd_.size();
  const int c = components();
  if (phi.rows() != M || phi.cols() != c)
    throw ConcentraError(ErrorKind::Domain, "section has the wrong shape for the Jacobi operator");
  Eigen::MatrixXd out = -cd_.grid.derivative_columns(phi, 2);
  for (int v = 0; v < M; ++v) {
    out.row(v) /= cd_.g_tilde(v);
    out.row(v) += (potential_[v] * phi.row(v).transpose()).transpose();
  }
  return out;
}

Eigen::MatrixXd JacobiOperator::dense_matrix() const {
  const int M = cd_.size();
  const int c = components();
  const Eigen::MatrixXd d2 = cd_.grid.second_derivative_matrix();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M * c, M * c);
  // unknown (node v, component m) sits at v * c + m
  for (int v = 0; v < M; ++v)
    for (int w = 0; w < M; ++w)
      for (int m = 0; m < c; ++m) J(v * c + m, w * c + m) = -d2(v, w) / cd_.g_tilde(v);
  for (int v = 0; v < M; ++v) J.block(v * c, v * c, c, c) += potential_[v];
  return J;
}

const JacobiOperator::Factor& JacobiOperator::factor() const {
  if (!factor_) {
    Eigen::MatrixXd J = dense_matrix();
    J = 0.5 * (J + J.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
      throw ConcentraError(ErrorKind::Numerical, "Jacobi eigendecomposition failed");
    auto f = std::make_shared<Factor>();
    f->vectors = es.eigenvectors();
    f->values = es.eigenvalues();
    f->sigma_min = f->values.cwiseAbs().minCoeff();
    f->sigma_max = f->values.cwiseAbs().maxCoeff();
    factor_ = f;
  }
  return *factor_;
}

Eigen::VectorXd JacobiOperator::spectrum() const { return factor().values; }

double JacobiOperator::sigma_ratio() const {
  const auto& f = factor();
  return f.sigma_max > 0 ? f.sigma_min / f.sigma_max : 0.0;
}

Eigen::MatrixXd JacobiOperator::solve(const Eigen::MatrixXd& rhs, double tol) const {
  const int M = cd_.size();
  const int c = components();
  if (rhs.rows() != M || rhs.cols() != c)
    throw ConcentraError(ErrorKind::Domain, "section has the wrong shape for the Jacobi operator");
  const auto& f = factor();
  const double cut = threshold_ * f.sigma_max;
  if (f.sigma_min < cut) {
    std::vector<int> idx;
    for (int i = 0; i < f.values.size(); ++i)
      if (std::abs(f.values(i)) < cut) idx.push_back(i);
    Eigen::MatrixXd kernel(M * c, idx.size());
    for (std::size_t q = 0; q < idx.size(); ++q) kernel.col(q) = f.vectors.col(idx[q]);
    std::ostringstream msg;
    msg << "Jacobi operator is degenerate: sigma_min/sigma_max = " << f.sigma_min / f.sigma_max << ", near-kernel dimension "
        << idx.size();
    throw DegeneracyError(kernel, f.sigma_min / f.sigma_max, msg.str());
  }
  Eigen::VectorXd b(M * c);
  for (int v = 0; v < M; ++v)
    for (int m = 0; m < c; ++m) b(v * c + m) = rhs(v, m);
  Eigen::VectorXd coef = f.vectors.transpose() * b;
  coef.array() /= f.values.array();
  const Eigen::VectorXd x = f.vectors * coef;
  Eigen::MatrixXd phi(M, c);
  for (int v = 0; v < M; ++v)
    for (int m = 0; m < c; ++m) phi(v, m) = x(v * c + m);
  const double res = (apply(phi) - rhs).cwiseAbs().maxCoeff();
  if (res > tol * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
    throw ConcentraError(ErrorKind::Accuracy, "Jacobi solve residual " + std::to_string(res) + " above tolerance");
  return phi;
}

double jacobi_inner(const CurvatureData& cd, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double s = 0.0;
  for (int v = 0; v < cd.size(); ++v) s += a.row(v).dot(b.row(v)) * std::sqrt(cd.g_tilde(v));
  return s * cd.L / cd.size();
}

}  // namespace concentra
