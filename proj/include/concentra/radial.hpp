#ifndef CONCENTRA_RADIAL_HPP
#define CONCENTRA_RADIAL_HPP

#include <Eigen/Sparse>
#include <map>
#include <memory>
#include <vector>

namespace concentra {

// Radial nodes r_i = R(i), i = 0..M, with R odd in s so parity ghosts reflect cleanly.
class RadialGrid {
 public:
  static RadialGrid uniform(double h, double r_max);
  // r = knee * sinh(c s); spacing near the origin is about h0
  static RadialGrid graded(double h0, double knee, double r_max);

  std::size_t size() const { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  const std::vector<double>& nodes() const { return r_; }
  double r_max() const { return r_.back(); }
  // weights for the integral of f over [0, r_max] (Simpson in s)
  const std::vector<double>& quadrature_weights() const { return quad_; }

  struct Stencil {
    std::vector<int> index;
    std::vector<double> d1;  // d/dr
    std::vector<double> d2;  // d^2/dr^2
  };
  // parity = +1 for even functions of r, -1 for odd; order 4 or 6
  std::vector<Stencil> stencils(int parity, int order = 4) const;

  std::vector<double> derivative(const std::vector<double>& f, int parity, int order = 4) const;
  std::vector<double> second_derivative(const std::vector<double>& f, int parity, int order = 4) const;
  double integrate(const std::vector<double>& f) const;

 private:
  std::vector<double> r_, drds_, d2rds2_, quad_;
  mutable std::map<std::pair<int, int>, std::vector<Stencil>> stencil_cache_;
  const std::vector<Stencil>& cached_stencils(int parity, int order) const;
  void finish();
};

enum class OuterCondition { Dirichlet, Robin };

// -u'' - (dim-1)/r u' + n(n+dim-2)/r^2 u + c(r) u = f on a RadialGrid.
struct RadialProblem {
  int dim = 7;
  int degree = 0;
  std::vector<double> potential;  // c(r_i)
  OuterCondition outer = OuterCondition::Dirichlet;
  double robin_log_derivative = 0.0;  // u'/u at r_max
  int order = 4;
};

Eigen::SparseMatrix<double> assemble_radial(const RadialGrid& grid, const RadialProblem& prob);

class RadialSolver {
 public:
  RadialSolver(const RadialGrid& grid, const RadialProblem& prob);
  std::vector<double> solve(std::vector<double> rhs) const;
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

 private:
  int degree_;
  Eigen::SparseMatrix<double> matrix_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

// apply the operator of `prob` to nodal values (interior rows; boundary rows as assembled)
std::vector<double> apply_radial(const RadialGrid& grid, const RadialProblem& prob, const std::vector<double>& u);

}  // namespace concentra

#endif
