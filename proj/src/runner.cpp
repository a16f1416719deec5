#include "concentra/runner.hpp"

#include <cmath>

#include "concentra/constants.hpp"
#include "concentra/errors.hpp"
#include "concentra/geometry.hpp"
#include "concentra/spectrum.hpp"

namespace concentra {

using nlohmann::json;

namespace {

constexpr int kCoreIdentities = 6;

RunReport start(const std::string& name, const RunConfig& cfg) {
  RunReport r;
  r.subcommand = name;
  r.config = cfg.to_json();
  r.seed = cfg.seed;
  return r;
}

json identities_json(const IdentityReport& rep) {
  json out = json::array();
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const auto& c = rep.checks[i];
    out.push_back({{"name", c.name},
                   {"lhs", c.lhs},
                   {"rhs", c.rhs},
                   {"residual", c.residual},
                   {"pass", c.pass},
                   {"core", static_cast<int>(i) < kCoreIdentities}});
  }
  return out;
}

void identity_checks(RunReport& r, const IdentityReport& rep) {
  for (const auto& c : rep.checks) r.check("identity: " + c.name, c.residual, rep.tol, "<=", c.pass);
}

const ConstantsTable& constants_for(const RunConfig& cfg) { return bubble_constants(shared_kernel(cfg.N)); }

ReducedSpectrum spectrum_for(const RunConfig& cfg) {
  const CurvatureData cd = build_geometry(cfg);
  validate(cd);
  return reduced_spectrum(cd, constants_for(cfg));
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"constants", "identities", "mu0", "expand", "spectrum", "gaps", "all"};
  return names;
}

ExpansionOptions expansion_options(const RunConfig& cfg) {
  ExpansionOptions o;
  o.order = cfg.expansion.order;
  o.y_nodes = cfg.expansion.y_nodes;
  o.norm.sigma = cfg.solver.sigma;
  o.halfspace.h0 = cfg.solver.h;
  o.halfspace.r_max = cfg.solver.R_max;
  o.halfspace.n_theta = cfg.solver.n_theta;
  o.halfspace.seed = cfg.seed;
  return o;
}

RunReport run_constants(const RunConfig& cfg) {
  RunReport r = start("constants", cfg);
  const BubbleKernel& kernel = shared_kernel(cfg.N);
  const ConstantsTable& ct = bubble_constants(kernel);
  const EigenDiagnostics& eig = kernel.eigen_diagnostics();
  r.payload = {{"N", ct.N},
               {"A0", ct.A0_frak},
               {"A1", ct.A1_frak},
               {"B", ct.B},
               {"C0", ct.C0},
               {"A", ct.A},
               {"C", ct.C},
               {"D", ct.D},
               {"D_full", ct.D_full},
               {"lambda0", ct.lambda0},
               {"lambda0_bar", ct.lambda0_bar},
               {"eigen", {{"h", eig.h}, {"residual_inf", eig.residual_inf}, {"iterations", eig.iterations}}},
               {"identities", identities_json(ct.identities)}};
  r.tolerances = {{"quad_rel_tol", ct.quad_rel_tol}, {"identity_rel", ct.identities.tol}, {"eigen_residual", 1e-6}};
  identity_checks(r, ct.identities);
  r.check("lambda0 > 0", ct.lambda0, 0.0, ">", ct.lambda0 > 0.0);
  r.check("eigen residual", eig.residual_inf, 1e-6, "<=", eig.residual_inf <= 1e-6);
  return r;
}

RunReport run_identities(const RunConfig& cfg) {
  RunReport r = start("identities", cfg);
  const IdentityReport rep = verify_identities(shared_kernel(cfg.N), 1e-6);
  r.payload = {{"N", rep.N}, {"tol", rep.tol}, {"core_count", kCoreIdentities}, {"identities", identities_json(rep)}};
  r.tolerances = {{"identity_rel", rep.tol}};
  identity_checks(r, rep);
  r.csv.header = {"index", "lhs", "rhs", "residual", "pass"};
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const auto& c = rep.checks[i];
    r.csv.rows.push_back({static_cast<double>(i), c.lhs, c.rhs, c.residual, c.pass ? 1.0 : 0.0});
  }
  return r;
}

RunReport run_mu0(const RunConfig& cfg) {
  RunReport r = start("mu0", cfg);
  const CurvatureData cd = build_geometry(cfg);
  validate(cd);
  const double minimality = minimality_residual(cd);
  r.check("minimality residual", minimality, 1e-10, "<=", minimality <= 1e-10);
  // throws PositivityError at the first node with hbar <= 0
  const Eigen::VectorXd mu = mu0_field(cd, constants_for(cfg));
  r.csv.header = {"y", "hbar", "positivity", "mu0"};
  json rows = json::array();
  double hmin = INFINITY;
  for (int v = 0; v < cd.size(); ++v) {
    const double h = hbar(cd, v);
    hmin = std::min(hmin, h);
    r.csv.rows.push_back({cd.y(v), h, h > 0.0 ? 1.0 : 0.0, mu(v)});
    rows.push_back({{"y", cd.y(v)}, {"hbar", h}, {"positivity", h > 0.0}, {"mu0", mu(v)}});
  }
  r.payload = {{"geometry", cd.name},
               {"nodes", cd.size()},
               {"minimality_residual", minimality},
               {"hbar_min", hmin},
               {"mu0_min", mu.minCoeff()},
               {"mu0_max", mu.maxCoeff()},
               {"samples", rows}};
  r.tolerances = {{"minimality", 1e-10}};
  r.check("hbar > 0", hmin, 0.0, ">", hmin > 0.0);
  return r;
}

RunReport run_expand(const RunConfig& cfg) {
  RunReport r = start("expand", cfg);
  const CurvatureData cd = build_geometry(cfg);
  validate(cd);
  const ExpansionOptions opts = expansion_options(cfg);
  const SweepReport sw = expansion_sweep(cd, constants_for(cfg), cfg.expansion.eps_list, opts);
  const int I = sw.order;
  const bool fit = sw.rows.size() >= 2;
  json rows = json::array();
  for (const auto& row : sw.rows)
    rows.push_back({{"eps", row.eps},
                    {"w_norms", row.w_norms},
                    {"mu_norms", row.mu_norms},
                    {"phi_norms", row.phi_norms},
                    {"residual", row.residual},
                    {"mu_deviation", row.mu_deviation}});
  r.payload = {{"order", I},
               {"norm", "||w_k||_{eps, N-4}; residual in ||.||_{eps, N-2}"},
               {"y_nodes", opts.y_nodes},
               {"rows", rows},
               {"w_exponents", fit ? json(sw.w_exponents) : json(nullptr)},
               {"residual_exponent", fit ? json(sw.residual_exponent) : json(nullptr)}};
  r.tolerances = {{"projection", opts.projection_tol}, {"exponent_band", 0.3}};
  r.csv.header = {"layer", "eps", "norm", "fitted_exponent"};
  for (int k = 1; k <= I + 1; ++k)
    for (const auto& row : sw.rows)
      r.csv.rows.push_back({static_cast<double>(k), row.eps, row.w_norms[k - 1], fit ? sw.w_exponents[k - 1] : NAN});
  if (fit) {
    for (int k = 1; k <= I + 1; ++k) {
      const double target = 1.0 + (k - 1) / 2.0;
      const double dev = std::abs(sw.w_exponents[k - 1] - target);
      r.check("w" + std::to_string(k) + " exponent vs " + std::to_string(target).substr(0, 3), dev, 0.3, "<=",
              dev <= 0.3);
    }
    const double need = 1.0 + (I + 1) / 2.0 - 0.3;
    r.check("residual slope", sw.residual_exponent, need, ">=", sw.residual_exponent >= need);
  }
  return r;
}

RunReport run_spectrum(const RunConfig& cfg) {
  RunReport r = start("spectrum", cfg);
  const ReducedSpectrum spec = spectrum_for(cfg);
  const double s_lo = std::ldexp(1.0, -(cfg.spectrum.level_hi + 1));
  const double s_hi = std::ldexp(1.0, -cfg.spectrum.level_lo);
  const int P = cfg.spectrum.sigma_points, J = cfg.spectrum.J;
  r.csv.header = {"sigma", "j", "lambda"};
  bool sorted = true;
  for (int k = 0; k < P; ++k) {
    const double sigma = s_lo * std::pow(s_hi / s_lo, k / (P - 1.0));
    const Eigen::VectorXd ev = spec.eigenvalues(sigma, J);
    for (int j = 0; j < J; ++j) {
      r.csv.rows.push_back({sigma, j + 1.0, ev(j)});
      if (j > 0 && ev(j) < ev(j - 1)) sorted = false;
    }
  }
  const int dim = std::min(J, 40);
  const CourantFischerReport cf = courant_fischer_check(spec, std::sqrt(std::sqrt(s_lo * s_hi)), 128, dim, cfg.seed);
  const ReducedForms forms = reduced_forms(build_geometry(cfg), constants_for(cfg), 1.0);
  r.payload = {{"D", spec.D},
               {"lambda0", spec.lambda0},
               {"L", spec.L},
               {"g_tilde", spec.g_tilde},
               {"forms", {{"A", forms.A}, {"B", forms.B}, {"C", forms.C}, {"D", forms.D}}},
               {"excluded", forms.excluded},
               {"sigma_range", {s_lo, s_hi}},
               {"J", J},
               {"points", P},
               {"courant_fischer",
                {{"dimension", cf.dimension},
                 {"max_violation", cf.max_violation},
                 {"max_agreement", cf.max_agreement},
                 {"pass", cf.pass}}}};
  r.tolerances = {{"courant_fischer_agreement", 1e-8}};
  r.check("eigenvalues sorted", sorted ? 0.0 : 1.0, 0.0, "==", sorted);
  r.check("Courant-Fischer upper bound", cf.max_violation, 0.0, "<=", cf.max_violation <= 1e-10);
  r.check("Courant-Fischer exact subspace", cf.max_agreement, 1e-8, "<=", cf.max_agreement <= 1e-8);
  return r;
}

RunReport run_gaps(const RunConfig& cfg) {
  RunReport r = start("gaps", cfg);
  const ReducedSpectrum spec = spectrum_for(cfg);
  const GapSuite suite = gap_suite(spec, cfg.spectrum.level_lo, cfg.spectrum.level_hi, cfg.spectrum.c_target);
  json levels = json::array();
  r.csv.header = {"l", "sigma_l", "eps_l", "gap", "c_observed", "crossing_count", "gap_width"};
  for (std::size_t i = 0; i < suite.levels.size(); ++i) {
    const GapResult& g = suite.levels[i];
    json crossings = json::array();
    for (const auto& c : g.crossings)
      crossings.push_back({{"mode", c.mode}, {"multiplicity", c.multiplicity}, {"sigma", c.sigma}});
    levels.push_back({{"l", g.level},
                      {"sigma_l", g.sigma_l},
                      {"eps_l", g.eps_l},
                      {"gap", g.certified_gap},
                      {"c_observed", g.c_observed},
                      {"meets_target", g.meets_target},
                      {"window", {g.sigma_lo, g.sigma_hi}},
                      {"gap_interval", {g.gap_lo, g.gap_hi}},
                      {"gap_width", g.gap_width},
                      {"crossing_count", g.crossing_count},
                      {"weyl_bound", suite.weyl_bound[i]},
                      {"grid_points", g.grid_points},
                      {"dep2",
                       {{"gamma_minus", suite.dep2[i].gamma_minus},
                        {"gamma_plus", suite.dep2[i].gamma_plus},
                        {"pairs", suite.dep2[i].pairs},
                        {"violations", suite.dep2[i].violations}}},
                      {"crossings", crossings}});
    r.csv.rows.push_back({static_cast<double>(g.level), g.sigma_l, g.eps_l, g.certified_gap, g.c_observed,
                          static_cast<double>(g.crossing_count), g.gap_width});
  }
  r.payload = {{"levels", levels},
               {"count_density", suite.count_density},
               {"width_constant", suite.width_constant},
               {"width_spread", suite.width_spread},
               {"c_min", suite.c_min},
               {"c_spread", suite.c_spread}};
  r.tolerances = {{"band", 0.1}, {"count_factor", 2.0}, {"c_target", cfg.spectrum.c_target}};
  r.check("crossing counts vs Weyl bound", suite.counts_ok ? 1.0 : 0.0, 1.0, "==", suite.counts_ok);
  r.check("gap widths ~ 2^{-3l/2}", suite.width_spread, 0.1, ">=", suite.widths_ok);
  r.check("min |lambda| >= c eps_l", suite.c_min, cfg.spectrum.c_target, ">=", suite.margins_ok);
  r.check("dep2 sandwich", suite.dep2_ok ? 1.0 : 0.0, 1.0, "==", suite.dep2_ok);
  return r;
}

RunReport run_subcommand(const std::string& name, const RunConfig& cfg) {
  if (name == "constants") return run_constants(cfg);
  if (name == "identities") return run_identities(cfg);
  if (name == "mu0") return run_mu0(cfg);
  if (name == "expand") return run_expand(cfg);
  if (name == "spectrum") return run_spectrum(cfg);
  if (name == "gaps") return run_gaps(cfg);
  throw ConcentraError(ErrorKind::Validation, "unknown subcommand '" + name + "'");
}

}  // namespace concentra
