#ifndef CONCENTRA_MODE_FUNCTION_HPP
#define CONCENTRA_MODE_FUNCTION_HPP

#include <Eigen/Dense>
#include <Eigen/LU>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "concentra/bubble.hpp"
#include "concentra/poly.hpp"
#include "concentra/radial.hpp"

namespace concentra {

// Half-space R^N_+ in coordinates (r, theta, omega): xi_N = r cos(theta), xi-bar = r sin(theta) omega.
// Functions are stored at the nodes (r_i, theta_q); omega enters only through polynomial factors.
struct HalfspaceOptions {
  double h0 = 0.05;    // radial spacing near the origin
  double knee = 5.0;   // radial grading length
  double r_max = 200.0;
  int n_theta = 12;
  int order = 6;       // radial finite-difference order
  int random_directions = 16;
  std::uint64_t seed = 1234567;
};

// Gegenbauer data for one harmonic degree d: columns k hold C_{2k}^lambda at the theta nodes.
struct AngularTable {
  int degree = 0;
  double lambda = 0.0;
  Eigen::MatrixXd value;  // [q][k]
  Eigen::MatrixXd d1;     // d/dt
  Eigen::MatrixXd d2;     // d^2/dt^2
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // of value
};

// One term of a Fischer decomposition: coef * rho^{2 rho_power} * basis(channel).
struct FischerPiece {
  int rho_power = 0;
  MonoKey channel = 0;
  double coef = 0.0;
};

class HalfspaceGrid {
 public:
  HalfspaceGrid(int N, const HalfspaceOptions& opts = {});
  static std::shared_ptr<const HalfspaceGrid> make(int N, const HalfspaceOptions& opts = {});

  int N() const { return N_; }
  int nbar() const { return N_ - 1; }
  const HalfspaceOptions& options() const { return opts_; }
  const RadialGrid& radial() const { return grid_; }
  int nr() const { return static_cast<int>(grid_.size()); }
  int nt() const { return opts_.n_theta; }
  double r(int i) const { return grid_.r(i); }
  double t(int q) const { return t_[q]; }
  double sin_theta(int q) const { return s_[q]; }
  const BubbleKernel& kernel() const { return *kernel_; }

  // nodal profiles of the bubble data (constant in theta)
  const Eigen::MatrixXd& w0() const { return w0_; }
  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::MatrixXd& s() const { return s2_; }
  const Eigen::MatrixXd& z0() const { return z0_; }
  const Eigen::MatrixXd& z() const { return zz_; }
  const Eigen::MatrixXd& potential() const { return pot_; }
  Eigen::MatrixXd radial_nodal(const std::vector<double>& f) const;
  Eigen::MatrixXd ones() const { return Eigen::MatrixXd::Ones(nr(), nt()); }
  // r^a (cos theta)^b (sin theta)^c at the nodes
  Eigen::MatrixXd power(int a, int b, int c) const;

  // integral over R^N_+ of xi-bar^alpha F(r, theta)
  double integrate(MonoKey alpha, const Eigen::MatrixXd& F) const;
  // integral over S^{N-2} of omega^alpha
  double moment(MonoKey alpha) const;
  // quadrature weight of node (r_i, theta_q) including r^{N-1} sin^{N-2}(theta)
  const Eigen::MatrixXd& base_weight() const { return base_weight_; }

  // harmonic basis in xi-bar: channels are monomials whose last xi-bar exponent is at most 1
  const Poly& basis(MonoKey channel) const;
  const std::vector<Poly>& basis_gradient(MonoKey channel) const;
  const std::vector<std::vector<Poly>>& basis_hessian(MonoKey channel) const;
  const std::vector<FischerPiece>& fischer(MonoKey alpha) const;
  const AngularTable& angular(int degree) const;

  // sample directions omega in S^{N-2}: +-axes, +-e_i +- e_j diagonals, seeded random
  const std::vector<Eigen::VectorXd>& directions() const { return dirs_; }

 private:
  int N_;
  HalfspaceOptions opts_;
  RadialGrid grid_;
  std::vector<double> t_, s_, wt_;
  const BubbleKernel* kernel_;
  Eigen::MatrixXd w0_, q_, s2_, z0_, zz_, pot_;
  Eigen::MatrixXd base_weight_;  // radial weight * r^{N-1} * theta weight * sin^{N-2}
  std::vector<Eigen::VectorXd> dirs_;

  struct BasisData {
    Poly h;
    std::vector<Poly> grad;
    std::vector<std::vector<Poly>> hess;
  };
  const BasisData& basis_data(MonoKey channel) const;
  mutable std::map<MonoKey, BasisData> basis_;
  mutable std::map<MonoKey, std::vector<FischerPiece>> fischer_;
  mutable std::map<int, AngularTable> angular_;
  mutable std::map<MonoKey, double> moments_;
};

// Sum over xi-bar monomials alpha of xi-bar^alpha * F_alpha(r, theta).
class SymFunction {
 public:
  SymFunction() = default;
  explicit SymFunction(std::shared_ptr<const HalfspaceGrid> grid) : grid_(std::move(grid)) {}

  const HalfspaceGrid& grid() const { return *grid_; }
  const std::shared_ptr<const HalfspaceGrid>& grid_ptr() const { return grid_; }
  const std::map<MonoKey, Eigen::MatrixXd>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add(MonoKey alpha, const Eigen::MatrixXd& F, double c = 1.0);
  // p is a polynomial in (xi-bar, xi_N), xi_N = variable N-1
  void add_poly(const Poly& p, const Eigen::MatrixXd& F, double c = 1.0);

  SymFunction& operator+=(const SymFunction& o);
  SymFunction& operator-=(const SymFunction& o);
  SymFunction& operator*=(double c);
  friend SymFunction operator+(SymFunction a, const SymFunction& b) { return a += b; }
  friend SymFunction operator-(SymFunction a, const SymFunction& b) { return a -= b; }
  friend SymFunction operator*(double c, SymFunction a) { return a *= c; }

  SymFunction times(const Poly& p) const;
  SymFunction times(const Eigen::MatrixXd& F) const;
  SymFunction times(const SymFunction& o) const;

  double integrate() const;
  // integral of this times xi-bar^beta G
  double integrate_against(MonoKey beta, const Eigen::MatrixXd& G) const;
  int max_degree() const;
  double max_abs() const;

  // values at (r_i, theta_q, direction k): out[(i * nt + q) * ndir + k]
  std::vector<double> sample(const std::vector<Eigen::VectorXd>& dirs) const;

 private:
  std::shared_ptr<const HalfspaceGrid> grid_;
  std::map<MonoKey, Eigen::MatrixXd> terms_;
};

// Derivative data of one channel e(xi-bar) K(r, t), nodal arrays [r][theta].
struct ChannelJet {
  Eigen::MatrixXd K, Drho, DN, DrhoDrho, DNDrho, DNDN;
};

// Sum over harmonic channels e_m(xi-bar) sum_k v_{m,k}(r) C_{2k}^{lambda_m}(cos theta); even in xi_N.
class ModeFunction {
 public:
  ModeFunction() = default;
  explicit ModeFunction(std::shared_ptr<const HalfspaceGrid> grid) : grid_(std::move(grid)) {}

  static ModeFunction from_sym(const SymFunction& f);
  SymFunction to_sym() const;

  const HalfspaceGrid& grid() const { return *grid_; }
  const std::shared_ptr<const HalfspaceGrid>& grid_ptr() const { return grid_; }
  // modal profiles v_{m,k}(r_i): [i][k]
  const std::map<MonoKey, Eigen::MatrixXd>& channels() const { return channels_; }
  std::map<MonoKey, Eigen::MatrixXd>& channels() { return channels_; }
  bool empty() const { return channels_.empty(); }
  int max_degree() const;

  Eigen::MatrixXd nodal(MonoKey channel) const;
  ChannelJet jet(MonoKey channel) const;

  ModeFunction& operator+=(const ModeFunction& o);
  ModeFunction& operator-=(const ModeFunction& o);
  ModeFunction& operator*=(double c);
  friend ModeFunction operator+(ModeFunction a, const ModeFunction& b) { return a += b; }
  friend ModeFunction operator-(ModeFunction a, const ModeFunction& b) { return a -= b; }
  friend ModeFunction operator*(double c, ModeFunction a) { return a *= c; }

  // first and second xi-derivatives; index N-1 is xi_N
  SymFunction derivative(int I) const;
  SymFunction second_derivative(int I, int J) const;
  SymFunction laplacian() const;

  std::vector<double> sample(const std::vector<Eigen::VectorXd>& dirs) const;
  // value at an arbitrary point (even reflection in xi_N, zero beyond r_max)
  double eval(const Eigen::VectorXd& xi) const;
  double max_abs_coefficient() const;

 private:
  std::shared_ptr<const HalfspaceGrid> grid_;
  std::map<MonoKey, Eigen::MatrixXd> channels_;
};

}  // namespace concentra

#endif
