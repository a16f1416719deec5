#ifndef CONCENTRA_CONSTANTS_HPP
#define CONCENTRA_CONSTANTS_HPP

#include <string>
#include <vector>

#include "concentra/bubble.hpp"
#include "concentra/quadrature.hpp"

namespace concentra {

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // relative
  bool pass = false;
};

struct IdentityReport {
  int N = 0;
  double tol = 0.0;
  std::vector<IdentityCheck> checks;
  bool all_pass() const;
  const IdentityCheck* find(const std::string& name) const;
};

struct ConstantsTable {
  int N = 0;
  double A0_frak = 0.0;
  double A1_frak = 0.0;
  double B = 0.0;   // int_+ w0^2
  double C0 = 0.0;  // int_+ |d_1 w0|^2
  double A = 0.0;   // int_+ Z0^2
  double C = 0.0;   // int_+ Z1^2
  double D = 0.0;   // int_+ Z^2
  double D_full = 0.0;  // int_{R^N} Z^2
  double lambda0 = 0.0;
  double lambda0_bar = 0.0;
  double quad_rel_tol = 0.0;
  IdentityReport identities;
};

// Cached per (N, tolerance); the kernel must have the same N.
const ConstantsTable& bubble_constants(const BubbleKernel& kernel, const QuadOptions& opts = {});
ConstantsTable compute_constants(const BubbleKernel& kernel, const QuadOptions& opts = {});

IdentityReport verify_identities(const BubbleKernel& kernel, double tol, const QuadOptions& opts = {});

// Shared kernel instance per N (default eigen options).
const BubbleKernel& shared_kernel(int N);

}  // namespace concentra

#endif
