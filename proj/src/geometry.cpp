#include "concentra/geometry.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "concentra/errors.hpp"

namespace concentra {

Eigen::MatrixXd CurvatureData::H2(int node) const {
  const Eigen::MatrixXd& h = H[node];
  Eigen::MatrixXd out(N, N);
  const double gt = g_tilde(node);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      double s = gt * h(a, 0) * h(b, 0);
      for (int i = 1; i < N; ++i) s += h(a, i) * h(i, b);
      out(a, b) = s;
    }
  return out;
}

Eigen::MatrixXd CurvatureData::jacobi_potential(int node) const {
  Eigen::MatrixXd pot(N - 1, N - 1);
  for (int m = 1; m < N; ++m)
    for (int l = 1; l < N; ++l)
      pot(m - 1, l - 1) = riemann(node, m, 0, 0, l) / g_tilde(node) - Gamma[node](m) * Gamma[node](l);
  return pot;
}

Eigen::VectorXd CurvatureData::field_H(int a, int b) const {
  Eigen::VectorXd f(size());
  for (int v = 0; v < size(); ++v) f(v) = H[v](a, b);
  return f;
}

std::vector<double> gauss_curvature_tensor(const Eigen::MatrixXd& H) {
  const int N = static_cast<int>(H.rows());
  std::vector<double> R(static_cast<std::size_t>(N) * N * N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          R[((i * N + j) * N + k) * N + l] = H(i, k) * H(j, l) - H(i, l) * H(j, k);
  return R;
}

void validate(const CurvatureData& cd, double tol) {
  const int N = cd.N;
  if (N < 2) throw ConcentraError(ErrorKind::Validation, "curvature data needs N >= 2");
  const int M = cd.size();
  if (static_cast<int>(cd.H.size()) != M || static_cast<int>(cd.R.size()) != M ||
      static_cast<int>(cd.Gamma.size()) != M || cd.g_tilde.size() != M)
    throw ConcentraError(ErrorKind::Validation, "curvature fields do not match the grid size");
  for (int v = 0; v < M; ++v) {
    const auto& h = cd.H[v];
    if (h.rows() != N || h.cols() != N || !h.allFinite())
      throw ConcentraError(ErrorKind::Validation, "shape operator has wrong shape or non-finite entries");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol * scale)
      throw ConcentraError(ErrorKind::Validation, "shape operator is not symmetric at y = " + std::to_string(cd.y(v)));
    if (!(cd.g_tilde(v) > 0.0))
      throw ConcentraError(ErrorKind::Validation, "induced metric must be positive");
    for (int i = 0; i < N; ++i)
      for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t)
          for (int j = 0; j < N; ++j) {
            const double a = cd.riemann(v, i, s, t, j);
            const double b = cd.riemann(v, s, i, t, j);
            if (!std::isfinite(a) || std::abs(a + b) > tol * std::max(1.0, std::abs(a))) {
              std::ostringstream msg;
              msg << "curvature tensor violates R_{istj} = -R_{sitj} at (" << i << "," << s << "," << t << "," << j
                  << ")";
              throw ConcentraError(ErrorKind::Validation, msg.str());
            }
          }
  }
}

namespace {

CurvatureData from_shape_field(const std::string& name, int n, double L, int grid,
                               const std::function<Eigen::MatrixXd(double)>& shape) {
  if (n < 3) throw ConcentraError(ErrorKind::Validation, "ambient dimension n must be at least 3");
  CurvatureData cd;
  cd.name = name;
  cd.N = n - 1;
  cd.L = L;
  cd.grid = PeriodicGrid(grid, L);
  cd.g_tilde = Eigen::VectorXd::Ones(grid);
  for (int v = 0; v < grid; ++v) {
    cd.H.push_back(shape(cd.grid.y(v)));
    cd.R.push_back(gauss_curvature_tensor(cd.H.back()));
    cd.Gamma.push_back(Eigen::VectorXd::Zero(cd.N));
  }
  validate(cd);
  return cd;
}

double fourier_value(const FourierEntry& e, double y, double L) {
  double v = e.constant;
  const double k0 = 2.0 * M_PI / L;
  for (std::size_t m = 0; m < e.cos_coef.size(); ++m) v += e.cos_coef[m] * std::cos(k0 * (m + 1) * y);
  for (std::size_t m = 0; m < e.sin_coef.size(); ++m) v += e.sin_coef[m] * std::sin(k0 * (m + 1) * y);
  return v;
}

void check_index(const FourierEntry& e, std::size_t count, int lo, int N, const char* what) {
  if (e.index.size() != count)
    throw ConcentraError(ErrorKind::Validation, std::string(what) + " entry has the wrong number of indices");
  for (int i : e.index)
    if (i < lo || i >= N) throw ConcentraError(ErrorKind::Validation, std::string(what) + " index out of range");
}

}  // namespace

CurvatureData round_sphere(int n, int grid) {
  return from_shape_field("round_sphere", n, 2.0 * M_PI, grid,
                          [n](double) { return Eigen::MatrixXd::Identity(n - 1, n - 1).eval(); });
}

CurvatureData spheroid_equator(int n, double aspect, int grid) {
  if (!(aspect > 0)) throw ConcentraError(ErrorKind::Validation, "spheroid aspect must be positive");
  return from_shape_field("spheroid_equator", n, 2.0 * M_PI, grid, [n, aspect](double) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n - 1, n - 1) / (aspect * aspect);
    h(0, 0) = 1.0;
    return h;
  });
}

CurvatureData flat_geometry(int n, double L, int grid) {
  return from_shape_field("flat", n, L, grid, [n](double) { return Eigen::MatrixXd::Zero(n - 1, n - 1).eval(); });
}

CurvatureData perturbed_sphere(int n, double amp, int grid) {
  return from_shape_field("perturbed_sphere", n, 2.0 * M_PI, grid, [n, amp](double y) {
    const int N = n - 1;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(N, N);
    p(0, 0) = std::cos(y);
    for (int i = 1; i < N; ++i) p(i, i) = 1.0 + 0.5 * std::cos(y + 2.0 * M_PI * i / (N - 1));
    p(0, 1) = p(1, 0) = 0.5 * std::sin(y);
    return (Eigen::MatrixXd::Identity(N, N) + amp * p).eval();
  });
}

CurvatureData synthetic_geometry(const SyntheticSpec& spec) {
  const int N = spec.n - 1;
  if (N < 2) throw ConcentraError(ErrorKind::Validation, "ambient dimension n must be at least 3");
  if (!(spec.L > 0)) throw ConcentraError(ErrorKind::Validation, "curve length must be positive");
  CurvatureData cd;
  cd.name = "synthetic";
  cd.N = N;
  cd.L = spec.L;
  cd.grid = PeriodicGrid(spec.grid, spec.L);
  cd.g_tilde = Eigen::VectorXd::Constant(spec.grid, spec.g_tilde);

  // literal entries; a missing partner is filled, a conflicting partner is left for validate()
  std::map<std::vector<int>, const FourierEntry*> h_given, r_given;
  for (const auto& e : spec.H) {
    check_index(e, 2, 0, N, "H");
    h_given[e.index] = &e;
  }
  for (const auto& e : spec.R) {
    check_index(e, 4, 0, N, "R");
    r_given[e.index] = &e;
  }
  for (const auto& e : spec.Gamma) check_index(e, 1, 1, N, "Gamma");

  for (int v = 0; v < spec.grid; ++v) {
    const double y = cd.grid.y(v);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
    for (const auto& [idx, e] : h_given) {
      const double val = fourier_value(*e, y, spec.L);
      h(idx[0], idx[1]) = val;
      if (!h_given.count({idx[1], idx[0]})) h(idx[1], idx[0]) = val;
    }
    std::vector<double> R = spec.R_from_gauss ? gauss_curvature_tensor(h)
                                              : std::vector<double>(static_cast<std::size_t>(N) * N * N * N, 0.0);
    auto at = [N](int i, int j, int k, int l) { return static_cast<std::size_t>(((i * N + j) * N + k) * N + l); };
    for (const auto& [idx, e] : r_given) {
      const double val = fourier_value(*e, y, spec.L);
      R[at(idx[0], idx[1], idx[2], idx[3])] += val;
      if (idx[0] != idx[1] && !r_given.count({idx[1], idx[0], idx[2], idx[3]}))
        R[at(idx[1], idx[0], idx[2], idx[3])] -= val;
    }
    Eigen::VectorXd gam = Eigen::VectorXd::Zero(N);
    for (const auto& e : spec.Gamma) gam(e.index[0]) += fourier_value(e, y, spec.L);
    cd.H.push_back(h);
    cd.R.push_back(std::move(R));
    cd.Gamma.push_back(gam);
  }
  validate(cd);
  return cd;
}

double minimality_residual(const CurvatureData& cd) {
  double m = 0.0;
  for (const auto& g : cd.Gamma) m = std::max(m, g.tail(cd.N - 1).cwiseAbs().maxCoeff());
  return m;
}

double hbar(const CurvatureData& cd, int node) {
  const auto& h = cd.H[node];
  return 2.0 * h(0, 0) + h.diagonal().tail(cd.N - 1).sum();
}

double hbar_trace_form(const CurvatureData& cd, int node) {
  const auto& h = cd.H[node];
  return 2.0 * h.trace() - h.diagonal().tail(cd.N - 1).sum();
}

Eigen::VectorXd hbar_field(const CurvatureData& cd) {
  Eigen::VectorXd f(cd.size());
  for (int v = 0; v < cd.size(); ++v) f(v) = hbar(cd, v);
  return f;
}

bool hbar_positive(const CurvatureData& cd) { return hbar_field(cd).minCoeff() > 0.0; }

CurvatureData resample(const CurvatureData& cd, int grid) {
  if (grid == cd.size()) return cd;
  const int N = cd.N;
  const int M = cd.size();
  CurvatureData out = cd;
  out.grid = PeriodicGrid(grid, cd.L);
  out.H.assign(grid, Eigen::MatrixXd::Zero(N, N));
  out.R.assign(grid, std::vector<double>(cd.R[0].size()));
  out.Gamma.assign(grid, Eigen::VectorXd::Zero(N));
  auto resample_field = [&](const std::function<double(int)>& get) {
    Eigen::VectorXd f(M);
    for (int v = 0; v < M; ++v) f(v) = get(v);
    return cd.grid.resample(f, grid);
  };
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      auto f = resample_field([&](int v) { return cd.H[v](a, b); });
      for (int v = 0; v < grid; ++v) out.H[v](a, b) = f(v);
    }
  for (std::size_t e = 0; e < cd.R[0].size(); ++e) {
    bool any = false;
    for (int v = 0; v < M && !any; ++v) any = cd.R[v][e] != 0.0;
    if (!any) continue;
    auto f = resample_field([&](int v) { return cd.R[v][e]; });
    for (int v = 0; v < grid; ++v) out.R[v][e] = f(v);
  }
  for (int i = 0; i < N; ++i) {
    auto f = resample_field([&](int v) { return cd.Gamma[v](i); });
    for (int v = 0; v < grid; ++v) out.Gamma[v](i) = f(v);
  }
  out.g_tilde = resample_field([&](int v) { return cd.g_tilde(v); });
  return out;
}

}  // namespace concentra
