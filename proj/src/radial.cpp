#include "concentra/radial.hpp"

#include <cmath>

#include "concentra/errors.hpp"
#include "concentra/special.hpp"

namespace concentra {

RadialGrid RadialGrid::uniform(double h, double r_max) {
  RadialGrid g;
  int m = static_cast<int>(std::ceil(r_max / h - 1e-9));
  if (m % 2) ++m;
  const double step = r_max / m;
  for (int i = 0; i <= m; ++i) {
    g.r_.push_back(step * i);
    g.drds_.push_back(step);
    g.d2rds2_.push_back(0.0);
  }
  g.finish();
  return g;
}

RadialGrid RadialGrid::graded(double h0, double knee, double r_max) {
  RadialGrid g;
  const double smax = std::asinh(r_max / knee);
  int m = static_cast<int>(std::ceil(knee * smax / h0));
  if (m % 2) ++m;
  const double c = smax / m;
  for (int i = 0; i <= m; ++i) {
    const double s = c * i;
    g.r_.push_back(knee * std::sinh(s));
    g.drds_.push_back(knee * c * std::cosh(s));
    g.d2rds2_.push_back(knee * c * c * std::sinh(s));
  }
  g.r_.back() = r_max;
  g.finish();
  return g;
}

void RadialGrid::finish() {
  const std::size_t m = r_.size() - 1;
  quad_.assign(r_.size(), 0.0);
  for (std::size_t i = 0; i <= m; ++i) {
    double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    quad_[i] = w / 3.0 * drds_[i];
  }
}

std::vector<RadialGrid::Stencil> RadialGrid::stencils(int parity, int order) const {
  const int m = static_cast<int>(r_.size()) - 1;
  const int hw = order / 2;
  std::vector<Stencil> out(m + 1);
  for (int i = 0; i <= m; ++i) {
    int lo, hi;
    if (i + hw <= m) {
      lo = i - hw;
      hi = i + hw;
    } else {
      hi = m;
      lo = m - order - 1;
    }
    std::vector<double> s;
    for (int j = lo; j <= hi; ++j) s.push_back(static_cast<double>(j));
    const auto w = fd_weights(static_cast<double>(i), s, 2);
    const double a1 = 1.0 / drds_[i];
    const double a2 = 1.0 / (drds_[i] * drds_[i]);
    const double b2 = -d2rds2_[i] / (drds_[i] * drds_[i] * drds_[i]);
    Stencil st;
    for (int j = lo; j <= hi; ++j) {
      int idx = j;
      double sign = 1.0;
      if (j < 0) {
        idx = -j;
        sign = parity;
      }
      const double d1 = sign * a1 * w[1][j - lo];
      const double d2 = sign * (a2 * w[2][j - lo] + b2 * w[1][j - lo]);
      bool merged = false;
      for (std::size_t q = 0; q < st.index.size(); ++q) {
        if (st.index[q] == idx) {
          st.d1[q] += d1;
          st.d2[q] += d2;
          merged = true;
        }
      }
      if (!merged) {
        st.index.push_back(idx);
        st.d1.push_back(d1);
        st.d2.push_back(d2);
      }
    }
    out[i] = std::move(st);
  }
  return out;
}

const std::vector<RadialGrid::Stencil>& RadialGrid::cached_stencils(int parity, int order) const {
  auto it = stencil_cache_.find({parity, order});
  if (it == stencil_cache_.end()) it = stencil_cache_.emplace(std::make_pair(parity, order), stencils(parity, order)).first;
  return it->second;
}

std::vector<double> RadialGrid::derivative(const std::vector<double>& f, int parity, int order) const {
  const auto& st = cached_stencils(parity, order);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t q = 0; q < st[i].index.size(); ++q) out[i] += st[i].d1[q] * f[st[i].index[q]];
  return out;
}

std::vector<double> RadialGrid::second_derivative(const std::vector<double>& f, int parity, int order) const {
  const auto& st = cached_stencils(parity, order);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t q = 0; q < st[i].index.size(); ++q) out[i] += st[i].d2[q] * f[st[i].index[q]];
  return out;
}

double RadialGrid::integrate(const std::vector<double>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += quad_[i] * f[i];
  return s;
}

Eigen::SparseMatrix<double> assemble_radial(const RadialGrid& grid, const RadialProblem& prob) {
  const int m = static_cast<int>(grid.size()) - 1;
  const int parity = prob.degree % 2 ? -1 : 1;
  const auto st = grid.stencils(parity, prob.order);
  const double kappa = prob.degree * (prob.degree + prob.dim - 2.0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m + 1) * 8);
  for (int i = 0; i <= m; ++i) {
    const auto& s = st[i];
    if (i == 0) {
      if (prob.degree == 0) {
        // u'(0) = 0, so (dim-1) u'/r -> (dim-1) u''(0)
        for (std::size_t q = 0; q < s.index.size(); ++q) trip.emplace_back(0, s.index[q], -prob.dim * s.d2[q]);
        trip.emplace_back(0, 0, prob.potential[0]);
      } else {
        trip.emplace_back(0, 0, 1.0);
      }
      continue;
    }
    if (i == m) {
      if (prob.outer == OuterCondition::Dirichlet) {
        trip.emplace_back(m, m, 1.0);
      } else {
        for (std::size_t q = 0; q < s.index.size(); ++q) trip.emplace_back(m, s.index[q], s.d1[q]);
        trip.emplace_back(m, m, -prob.robin_log_derivative);
      }
      continue;
    }
    const double r = grid.r(i);
    for (std::size_t q = 0; q < s.index.size(); ++q)
      trip.emplace_back(i, s.index[q], -s.d2[q] - (prob.dim - 1.0) / r * s.d1[q]);
    trip.emplace_back(i, i, kappa / (r * r) + prob.potential[i]);
  }
  Eigen::SparseMatrix<double> a(m + 1, m + 1);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

RadialSolver::RadialSolver(const RadialGrid& grid, const RadialProblem& prob)
    : degree_(prob.degree), matrix_(assemble_radial(grid, prob)) {
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  if (lu_->info() != Eigen::Success)
    throw ConcentraError(ErrorKind::Numerical, "radial operator factorization failed (degree " +
                                                   std::to_string(prob.degree) + ")");
}

std::vector<double> RadialSolver::solve(std::vector<double> rhs) const {
  if (degree_ > 0) rhs.front() = 0.0;
  rhs.back() = 0.0;
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = lu_->solve(b);
  if (lu_->info() != Eigen::Success || !x.allFinite())
    throw ConcentraError(ErrorKind::Numerical, "radial solve failed");
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> apply_radial(const RadialGrid& grid, const RadialProblem& prob, const std::vector<double>& u) {
  const auto a = assemble_radial(grid, prob);
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd y = a * x;
  return std::vector<double>(y.data(), y.data() + y.size());
}

}  // namespace concentra
