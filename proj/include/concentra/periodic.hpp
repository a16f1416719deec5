#ifndef CONCENTRA_PERIODIC_HPP
#define CONCENTRA_PERIODIC_HPP

#include <Eigen/Dense>
#include <vector>

namespace concentra {

// Uniform periodic grid y_i = i L / M with Fourier (spectral) differentiation.
class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  PeriodicGrid(int size, double length);

  int size() const { return size_; }
  double length() const { return length_; }
  double y(int i) const { return length_ * i / size_; }

  // order-th derivative of a periodic sample vector
  Eigen::VectorXd derivative(const Eigen::VectorXd& f, int order = 1) const;
  // columnwise derivative of [node x component] data
  Eigen::MatrixXd derivative_columns(const Eigen::MatrixXd& f, int order = 1) const;
  // trigonometric interpolation onto another grid of the same length
  Eigen::VectorXd resample(const Eigen::VectorXd& f, int new_size) const;
  // dense second-derivative matrix (exact on the retained Fourier modes)
  Eigen::MatrixXd second_derivative_matrix() const;
  // max |c_m| over the upper third of the spectrum relative to max |c_m|
  double spectral_tail(const Eigen::VectorXd& f) const;
  // L^2 inner product with uniform weights L/M
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  int size_ = 0;
  double length_ = 0.0;
};

}  // namespace concentra

#endif
