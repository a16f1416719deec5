#ifndef CONCENTRA_EXPANSION_HPP
#define CONCENTRA_EXPANSION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "concentra/constants.hpp"
#include "concentra/geometry.hpp"
#include "concentra/halfspace_solver.hpp"
#include "concentra/jacobi.hpp"
#include "concentra/laplacian_terms.hpp"
#include "concentra/mode_function.hpp"
#include "concentra/quadrature.hpp"

namespace concentra {

// A1 * hbar / B at every node of cd; PositivityError at the first node where it is <= 0.
Eigen::VectorXd mu0_field(const CurvatureData& cd, const ConstantsTable& ct);

// mu0 [-trH d_N w0 + 2 xi_N H_ij d_ij w0 - mu0 w0] at one node, as quadrature terms and as a grid function.
std::vector<RadialTerm> g1_terms(const Eigen::MatrixXd& H, double mu0, const BubbleKernel& kernel);
SymFunction g1_sym(const std::shared_ptr<const HalfspaceGrid>& grid, const Eigen::MatrixXd& H, double mu0);
// (int g1 Z_0, ..., int g1 Z_{N-1}) by adaptive quadrature
Eigen::VectorXd g1_projection(const Eigen::MatrixXd& H, double mu0, const BubbleKernel& kernel,
                              const QuadOptions& opts = {});

struct ExpansionOptions {
  int order = 1;  // I, at most 3
  int y_nodes = 16;
  int max_iterations = 8;
  double projection_tol = 1e-8;  // absolute, per slot and node
  WeightedNormParams norm;       // eps is overwritten with the expansion eps
  OperatorTerms terms;
  HalfspaceOptions halfspace;
};

struct StageRecord {
  int stage = 0;
  int iterations = 0;
  double initial_z0 = 0.0;  // max_y |int R Z_0| before the mu/Phi choice
  double initial_zl = 0.0;
  double final_z0 = 0.0;
  double final_zl = 0.0;
  double solve_seconds = 0.0;
};

struct ExpansionState {
  int N = 0;
  int order = 0;
  double eps = 0.0;
  ExpansionOptions options;
  CurvatureData cd;  // resampled to the y nodes
  std::shared_ptr<const HalfspaceGrid> grid;
  std::vector<NodeGeometry> geometry;
  double C0 = 0.0, B = 0.0;
  std::vector<Eigen::VectorXd> mu;               // mu[i] over nodes, i = 0..order
  std::vector<Eigen::MatrixXd> phi;              // phi[i-1] is Phi_i, nodes x (N-1)
  std::vector<std::vector<ModeFunction>> w;      // w[k-1][node] is w_k, k = 1..order+1
  std::vector<StageRecord> stages;

  int nodes() const { return cd.size(); }
  Eigen::VectorXd mu_total() const;
  Eigen::MatrixXd phi_total() const;
  LayerData layer_data(int node, int max_tau) const;
};

// Empty state carrying geometry, grid and mu0 (no layers).
ExpansionState init_expansion(const CurvatureData& cd, const ConstantsTable& ct, double eps,
                              const ExpansionOptions& opts = {});

// R_{i+1} at one node, given the layers mu_0..mu_i, Phi_1..Phi_i, w_1..w_i currently in the state.
SymFunction stage_remainder(const ExpansionState& s, int i, int node);
// kernel projections of R_{i+1}: rows are nodes, columns Z_0..Z_{N-1}, Z
Eigen::MatrixXd stage_projections(const ExpansionState& s, int i);

// One correction of Phi_i from the Z_l projections (JacobiOperator solve); returns the projections used.
Eigen::MatrixXd project_phi_step(ExpansionState& s, int i);
// One correction of mu_i from the Z_0 projection; returns the projections used.
Eigen::MatrixXd project_mu_step(ExpansionState& s, int i);
// w_{i+1} from R_{i+1} at every node
void solve_layer(ExpansionState& s, int i);

// w1 = solve(eps g1, mu0^2, eps) at every node
ExpansionState solve_order1(const CurvatureData& cd, const ConstantsTable& ct, double eps,
                            const ExpansionOptions& opts = {});
ExpansionState build_expansion(const CurvatureData& cd, const ConstantsTable& ct, double eps,
                               const ExpansionOptions& opts = {});

// sup over nodes of ||w_k||_{eps, r_weight}
double layer_norm(const ExpansionState& s, int k, double r_weight);
// sup of |f| + |f'| + |f''| over nodes and components
double field_norm(const Eigen::MatrixXd& f, const PeriodicGrid& grid);

struct ResidualOptions {
  int r_stride = 2;
  int dir_stride = 3;
  double r_weight = -1.0;  // default N - 2
  bool include_layers = true;
};

struct ResidualReport {
  double norm = 0.0;
  double r_weight = 0.0;
  std::vector<double> node_norm;
  double inner_sup = 0.0, outer_sup = 0.0;
  std::string truncation;  // formal order of what the operator drops
};

// pointwise Delta u + A'W - eps mu^2 W + (|W|^{p-1} W - w0^p), W = w0 + u, on the sample plan
ResidualReport residual(const ExpansionState& s, const ResidualOptions& opts = {});

struct GlobalApproximation {
  std::shared_ptr<const ExpansionState> state;
  double gamma = 0.75;
  double inner_radius() const;  // 2 eps^-gamma
  double outer_radius() const;  // 3 eps^-gamma
  double chi(double r) const;
  double chi_derivative(double r) const;
  // sup |chi'| / eps^gamma
  double chi_derivative_constant() const;
  // V at arclength y and normal coordinates X (X-bar, X_N)
  double eval(double y, const Eigen::VectorXd& X) const;
  // W_{I+1} at arclength y (trigonometric interpolation between nodes)
  double eval_inner(double y, const Eigen::VectorXd& xi) const;
  double mu_at(double y) const;
  Eigen::VectorXd phi_at(double y) const;
};

GlobalApproximation assemble_global(std::shared_ptr<const ExpansionState> state, double gamma);

// -(1/3) R_mijs int (xi_m Phi^s + xi_s Phi^m) d_ij w0 d_l w0 + (2/3) R_mssj Phi^m int d_j w0 d_l w0
// for random algebraic curvature tensors and random Phi; returns the largest |.| over l and samples.
struct CancellationReport {
  int samples = 0;
  double max_residual = 0.0;
  double max_term = 0.0;  // largest single contribution, for scale
  double mixed_integral = 0.0;  // int xi_j d_i w0 d_ij w0, i != j
  double C0 = 0.0;
};
CancellationReport curvature_cancellation(const BubbleKernel& kernel, int samples, std::uint64_t seed,
                                          const QuadOptions& opts = {});

// least-squares slope of log(values) against log(eps)
double fit_exponent(const std::vector<double>& eps, const std::vector<double>& values);

struct SweepRow {
  double eps = 0.0;
  std::vector<double> w_norms;    // ||w_k||_{eps, N-4}, k = 1..order+1
  std::vector<double> mu_norms;   // sup |mu_i|, i = 1..order
  std::vector<double> phi_norms;  // field_norm(Phi_i)
  double residual = 0.0;
  double mu_deviation = 0.0;      // sup |mu_eps - mu0|
};

struct SweepReport {
  int order = 0;
  std::vector<SweepRow> rows;
  std::vector<double> w_exponents;  // fitted, k = 1..order+1
  double residual_exponent = 0.0;
};

SweepReport expansion_sweep(const CurvatureData& cd, const ConstantsTable& ct, const std::vector<double>& eps_list,
                            const ExpansionOptions& opts = {}, const ResidualOptions& ropts = {});

}  // namespace concentra

#endif
