#include "concentra/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <string>

#include "concentra/errors.hpp"

namespace concentra {

double half_sphere_moment(MonoKey key, int N) {
  double lg = 0.0;
  int total = 0;
  for (int v = 0; v < N; ++v) {
    const int e = mono_exponent(key, v);
    if (v < N - 1 && e % 2) return 0.0;
    lg += std::lgamma((e + 1) / 2.0);
    total += e;
  }
  return std::exp(lg - std::lgamma((total + N) / 2.0));
}

namespace {

struct Integrand {
  const std::function<double(double)>* f;
  int power;
};

double integrand_eval(double r, void* data) {
  auto* in = static_cast<Integrand*>(data);
  return std::pow(r, in->power) * (*in->f)(r);
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

}  // namespace

QuadResult radial_integral(const std::function<double(double)>& f, int power, double decay,
                           const QuadOptions& opts) {
  gsl_set_error_handler_off();
  if (decay <= power + 1)
    throw ConcentraError(ErrorKind::Divergence, "declared decay order " + std::to_string(decay) +
                                                    " too slow for radial weight r^" + std::to_string(power));
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(gsl_integration_workspace_alloc(opts.limit));
  Integrand in{&f, power};
  gsl_function fn;
  fn.function = &integrand_eval;
  fn.params = &in;
  const double breaks[] = {0.0, 1.0, 4.0, 16.0, 64.0, 256.0, opts.r_cut};
  QuadResult res;
  for (std::size_t b = 0; b + 1 < sizeof(breaks) / sizeof(double); ++b) {
    const double lo = breaks[b];
    const double hi = std::min(breaks[b + 1], opts.r_cut);
    if (hi <= lo) break;
    double val = 0.0, err = 0.0;
    const int status = gsl_integration_qag(&fn, lo, hi, opts.abs_tol, opts.rel_tol, opts.limit,
                                           GSL_INTEG_GAUSS61, ws.get(), &val, &err);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
      throw ConcentraError(ErrorKind::Accuracy, std::string("radial quadrature failed: ") + gsl_strerror(status));
    res.value += val;
    res.error += err;
  }
  const double rc = opts.r_cut;
  const double tail = rc * integrand_eval(rc, &in) / (decay - power - 1.0);
  res.value += tail;
  // next-order uncertainty of the power-law tail model
  res.error += std::abs(tail) * 4.0 / rc;
  const double target = std::max(opts.abs_tol, 1e3 * opts.rel_tol * std::abs(res.value));
  if (res.error > target && res.error > 1e-300)
    throw ConcentraError(ErrorKind::Accuracy, "quadrature tolerance unreachable (error " + std::to_string(res.error) +
                                                  ", value " + std::to_string(res.value) + ")");
  return res;
}

QuadResult quad_halfspace(int N, const std::vector<RadialTerm>& terms, const QuadOptions& opts) {
  QuadResult total;
  for (const auto& t : terms) {
    if (t.decay <= N)
      throw ConcentraError(ErrorKind::Divergence,
                           "declared decay order " + std::to_string(t.decay) + " ≤ N: integral diverges");
    const double ang = half_sphere_moment(t.mono, N);
    if (ang == 0.0 || t.coef == 0.0) continue;
    const int deg = mono_degree(t.mono, N);
    const auto rad = radial_integral(t.radial, deg + N - 1, t.decay + deg, opts);
    total.value += t.coef * ang * rad.value;
    total.error += std::abs(t.coef * ang) * rad.error;
  }
  return total;
}

}  // namespace concentra
