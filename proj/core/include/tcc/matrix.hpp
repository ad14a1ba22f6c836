#pragma once

// Dense matrix utilities and the matrix moment function beta(A).

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tcc/clock.hpp"
#include "tcc/error.hpp"

namespace tcc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Principal matrix exponential.
Matrix mat_exp(const Matrix& a);

/// Principal logarithm. Throws SpectralError for eigenvalues on (-inf, 0].
Matrix mat_log(const Matrix& a);

/// Principal square root. Throws SpectralError for eigenvalues on (-inf, 0].
Matrix mat_sqrt(const Matrix& a);

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

/// a (+) b = a (x) I + I (x) b.
Matrix kron_sum(const Matrix& a, const Matrix& b);

/// Column stacking.
Vector vec(const Matrix& m);

/// Inverse of vec; throws ContractError when v.size() != rows * cols.
Matrix unvec(const Vector& v, Index rows, Index cols);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  ///< of scale * A, with multiplicity
  double max_real_part = 0.0;                     ///< over the eigenvalues and the point 0
  double margin_to_rmax = 0.0;                    ///< r_max - max_real_part (may be +inf)
  double r_max = 0.0;
  bool passes = false;
};

/// Default admissible distance to the boundary Re z = r_max.
double default_spectrum_margin(double rmax);

/// Checks {0} u spec(scale A) against dom(beta): passes iff the largest real
/// part is < r_max - margin. Points on the boundary are rejected.
SpectrumReport spectrum_check(const SubordinatorModel& model, const Matrix& a, double scale = 1.0,
                              std::optional<double> margin = std::nullopt);

/// Raised when a spectrum leaves dom(beta); carries the failed report.
class SpectrumDomainError : public DomainError {
 public:
  SpectrumDomainError(const std::string& what, SpectrumReport report)
      : DomainError(what), report_(std::move(report)) {}
  const SpectrumReport& report() const noexcept { return report_; }

 private:
  SpectrumReport report_;
};

/// beta(A) = b A + int (exp(A t) - I) lambda(dt), so that E[exp(A tau_s)] = exp(s beta(A)).
Matrix beta_matrix(const SubordinatorModel& model, const Matrix& a);

}  // namespace tcc
