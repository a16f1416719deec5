#include "concentra/periodic.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace concentra {

namespace {

std::vector<std::complex<double>> forward(const Eigen::VectorXd& f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> in(f.data(), f.data() + n);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

Eigen::VectorXd backward(std::vector<std::complex<double>> coef, int n) {
  Eigen::VectorXd out(n);
  fftw_plan plan =
      fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(coef.data()), out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out / static_cast<double>(n);
}

}  // namespace

PeriodicGrid::PeriodicGrid(int size, double length) : size_(size), length_(length) {
  if (size < 4 || size % 2) throw std::invalid_argument("periodic grid size must be even and >= 4");
  if (!(length > 0)) throw std::invalid_argument("periodic length must be positive");
}

Eigen::VectorXd PeriodicGrid::derivative(const Eigen::VectorXd& f, int order) const {
  if (order == 0) return f;
  auto c = forward(f);
  const double k0 = 2.0 * M_PI / length_;
  const int half = size_ / 2;
  for (int m = 0; m <= half; ++m) {
    std::complex<double> factor = std::pow(std::complex<double>(0.0, k0 * m), order);
    if (m == half && order % 2) factor = 0.0;
    c[m] *= factor;
  }
  return backward(std::move(c), size_);
}

Eigen::MatrixXd PeriodicGrid::derivative_columns(const Eigen::MatrixXd& f, int order) const {
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (int j = 0; j < f.cols(); ++j) out.col(j) = derivative(f.col(j), order);
  return out;
}

Eigen::VectorXd PeriodicGrid::resample(const Eigen::VectorXd& f, int new_size) const {
  auto c = forward(f);
  const int half_old = size_ / 2;
  std::vector<std::complex<double>> d(new_size / 2 + 1, 0.0);
  const double scale = static_cast<double>(new_size) / size_;
  for (int m = 0; m <= std::min(half_old, new_size / 2); ++m) {
    std::complex<double> v = c[m] * scale;
    // split the Nyquist mode when refining
    if (m == half_old && new_size > size_) v *= 0.5;
    if (m == new_size / 2 && new_size < size_) v = std::complex<double>(v.real(), 0.0);
    d[m] = v;
  }
  return backward(std::move(d), new_size);
}

Eigen::MatrixXd PeriodicGrid::second_derivative_matrix() const {
  Eigen::MatrixXd d2(size_, size_);
  for (int j = 0; j < size_; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(size_);
    e(j) = 1.0;
    d2.col(j) = derivative(e, 2);
  }
  return 0.5 * (d2 + d2.transpose());
}

double PeriodicGrid::spectral_tail(const Eigen::VectorXd& f) const {
  auto c = forward(f);
  double top = 0.0, tail = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    top = std::max(top, std::abs(c[m]));
    if (3 * m >= c.size() * 2) tail = std::max(tail, std::abs(c[m]));
  }
  return top > 0 ? tail / top : 0.0;
}

double PeriodicGrid::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return a.dot(b) * length_ / size_;
}

}  // namespace concentra
