#ifndef CONCENTRA_ERRORS_HPP
#define CONCENTRA_ERRORS_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace concentra {

enum class ErrorKind {
  Domain,
  Validation,
  Parse,
  Numerical,
  Divergence,
  Accuracy,
  Precondition,
  Representation,
  Resolution,
  Degeneracy,
  Positivity,
  Io
};

const char* error_kind_name(ErrorKind kind);

// CLI exit code contract: 2 validation, 3 numerical, 4 degeneracy/positivity.
int exit_code_for(ErrorKind kind);

class ConcentraError : public std::runtime_error {
 public:
  ConcentraError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class PreconditionError : public ConcentraError {
 public:
  PreconditionError(std::string slot, double projection, const std::string& what)
      : ConcentraError(ErrorKind::Precondition, what),
        slot_(std::move(slot)),
        projection_(projection) {}
  const std::string& slot() const { return slot_; }
  double projection() const { return projection_; }

 private:
  std::string slot_;
  double projection_;
};

class DegeneracyError : public ConcentraError {
 public:
  DegeneracyError(Eigen::MatrixXd near_kernel, double sigma_ratio, const std::string& what)
      : ConcentraError(ErrorKind::Degeneracy, what),
        near_kernel_(std::move(near_kernel)),
        sigma_ratio_(sigma_ratio) {}
  // columns span the near-kernel, stacked as [node][component]
  const Eigen::MatrixXd& near_kernel() const { return near_kernel_; }
  double sigma_ratio() const { return sigma_ratio_; }

 private:
  Eigen::MatrixXd near_kernel_;
  double sigma_ratio_;
};

class PositivityError : public ConcentraError {
 public:
  PositivityError(double y, double value, const std::string& what)
      : ConcentraError(ErrorKind::Positivity, what), y_(y), value_(value) {}
  double y() const { return y_; }
  double value() const { return value_; }

 private:
  double y_;
  double value_;
};

}  // namespace concentra

#endif
