#ifndef CONCENTRA_HALFSPACE_SOLVER_HPP
#define CONCENTRA_HALFSPACE_SOLVER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "concentra/mode_function.hpp"
#include "concentra/radial.hpp"

namespace concentra {

struct WeightedNormParams {
  double r_weight = 4.0;
  double sigma = 0.5;
  double eps = 0.01;
  double delta = 1.0;
  // throws unless 2 < r_weight < N, 0 < sigma < 1, eps > 0, delta > 0
  void validate(int N) const;
};

// (1 + |xi|^2)^{r/2} inside |xi| <= delta/sqrt(eps), eps^{-r/2} outside
double norm_weight(double radius, double r_weight, const WeightedNormParams& p);

// sup inside plus sup outside, over the nodes and the grid's sample directions
double weighted_norm(const ModeFunction& f, const WeightedNormParams& p);
double weighted_norm(const SymFunction& f, const WeightedNormParams& p);
double weighted_norm(const SymFunction& f, double r_weight, const WeightedNormParams& p);
double weighted_norm(const ModeFunction& f, double r_weight, const WeightedNormParams& p);
// values laid out as SymFunction::sample
double weighted_norm_samples(const HalfspaceGrid& g, const std::vector<double>& values, int ndir, double r_weight,
                             const WeightedNormParams& p);

struct HolderSampling {
  int r_stride = 6;
  int theta_stride = 4;
  int directions = 2;  // sample directions in xi-bar taken from the grid's list
  int levels = 4;      // offsets of length 2^{-j}, j < levels
};

// max over sample points xi and offsets h (|h| <= 1) of weight * |f(xi + h) - f(xi)| / |h|^sigma
double holder_seminorm_estimate(const ModeFunction& f, const WeightedNormParams& p, const HolderSampling& s = {});

// (int f Z_0, int f Z_1, ..., int f Z_{N-1}, int f Z) over R^N_+
Eigen::VectorXd project_kernel(const SymFunction& f);
Eigen::VectorXd project_kernel(const ModeFunction& f);
// sampled estimate of int |f Z_j|, j = 0..N-1 (scale for the orthogonality check)
Eigen::VectorXd kernel_projection_scale(const SymFunction& f);

struct SolverOptions {
  WeightedNormParams norm;
  double precondition_tol = 1e-5;  // relative to int |g Z_j|
  bool check_precondition = true;
  bool compute_norms = false;
};

struct SolveDiagnostics {
  Eigen::VectorXd rhs_projection;   // slots Z_0..Z_{N-1}, Z
  Eigen::VectorXd rhs_scale;        // int |g Z_j|
  Eigen::VectorXd post_projection;  // slots Z_0..Z_{N-1}, Z
  double beta = 0.0;
  double shift = 0.0;  // eps * a
  double norm_rhs = 0.0;   // ||g||_{eps, r}
  double norm_phi = 0.0;   // ||phi||_{eps, r-2}
  double ratio = 0.0;
  int radial_solves = 0;
};

// -Delta phi - p w0^{p-1} phi + eps a phi = g on R^N_+, d_N phi = 0, phi orthogonal to Z_0..Z_{N-1}.
class LinearizedSolver {
 public:
  LinearizedSolver(std::shared_ptr<const HalfspaceGrid> grid, double a, double eps, SolverOptions opts = {});

  ModeFunction solve(const SymFunction& g, SolveDiagnostics* diag = nullptr) const;
  double shift() const { return shift_; }
  const SolverOptions& options() const { return opts_; }

  // radial operator of channel degree d, angular mode k (tests)
  const RadialSolver& radial_solver(int d, int k) const;
  RadialProblem radial_problem(int d, int k) const;

 private:
  std::shared_ptr<const HalfspaceGrid> grid_;
  double shift_;
  SolverOptions opts_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<RadialSolver>> cache_;
};

ModeFunction solve_linearized(const SymFunction& g, double a, double eps, const SolverOptions& opts = {},
                              SolveDiagnostics* diag = nullptr);

struct RatioEnsemble {
  std::vector<double> eps;
  Eigen::MatrixXd ratio;  // members x eps
  double min_ratio = 0.0, max_ratio = 0.0;
  double band() const { return min_ratio > 0.0 ? max_ratio / min_ratio : INFINITY; }
};
// ||phi||_{eps, r-2} / ||g||_{eps, r} for seeded right-hand sides decaying like |xi|^{-r},
// made orthogonal to Z_0..Z_{N-1}
RatioEnsemble ratio_ensemble(const std::shared_ptr<const HalfspaceGrid>& grid, double a,
                             const std::vector<double>& eps_list, int members, std::uint64_t seed,
                             double r_weight = 4.0);

// name of kernel slot j ("Z0", "Z1", ..., "Z")
std::string kernel_slot_name(int j, int N);

}  // namespace concentra

#endif
