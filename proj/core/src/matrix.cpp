#include "tcc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "numeric_measure.hpp"

namespace tcc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    std::ostringstream os;
    os << op << " requires a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw ContractError(os.str());
  }
  if (!a.allFinite()) throw ContractError(std::string(op) + " requires finite entries");
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Principal log and sqrt are defined off the closed negative real axis.
void require_off_branch_cut(const Matrix& a, const char* op) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (const auto& lambda : eigenvalues(a)) {
    if (std::abs(lambda.imag()) <= 1e-14 * scale && lambda.real() <= 1e-14 * scale) {
      std::ostringstream os;
      os << op << ": eigenvalue " << lambda.real() << (lambda.imag() < 0 ? "-" : "+") << std::abs(lambda.imag())
         << "i lies on the branch cut (-inf, 0]";
      throw SpectralError(os.str());
    }
  }
}

// bA + int (exp(At) - I) lambda(dt) by Gauss-Legendre panels. The piece below
// t = 1 is integrated in log t; the panel count doubles until two successive
// estimates agree to 1e-8.
Matrix numeric_beta_matrix(const NumericMeasure& m, const Matrix& a, double max_real) {
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const Index n = a.rows();
  const Matrix eye = Matrix::Identity(n, n);
  const double a_norm = a.norm();

  auto integrate_panels = [&](double lo, double hi, bool log_scale, int panels) {
    Matrix sum = Matrix::Zero(n, n);
    const double width = (hi - lo) / panels;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * width;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (double sign : {-1.0, 1.0}) {
          if (x[i] == 0.0 && sign < 0.0) continue;
          const double u = mid + sign * 0.5 * width * x[i];
          const double t = log_scale ? std::exp(u) : u;
          const double dens = m.density(t);
          if (dens == 0.0) continue;
          const double jac = log_scale ? t : 1.0;
          sum += (0.5 * width * w[i] * dens * jac) * (mat_exp(a * t) - eye);
        }
      }
    }
    return sum;
  };
  auto converge = [&](double lo, double hi, bool log_scale) {
    if (!(lo < hi)) return Matrix(Matrix::Zero(n, n));
    Matrix previous = integrate_panels(lo, hi, log_scale, 4);
    for (int panels = 8; panels <= 8192; panels *= 2) {
      Matrix current = integrate_panels(lo, hi, log_scale, panels);
      const double diff = (current - previous).cwiseAbs().maxCoeff();
      if (diff < 1e-8 * std::max(1.0, current.cwiseAbs().maxCoeff())) return current;
      previous = std::move(current);
    }
    throw NumericalError("beta(A) quadrature for the numeric clock did not converge");
  };

  // Mass below `small` contributes at most |A| int t lambda(dt) ~ 1e-14.
  const double small = detail::lower_quantile(m, [](double t) { return t; }, 1e-14 / (1.0 + a_norm));
  const double rho = std::max(0.0, max_real);
  const double big = detail::upper_truncation(m, rho, 1e-14);

  Matrix result = m.b * a;
  const double split = std::clamp(1.0, m.t_lo, m.t_hi);
  result += converge(std::log(std::max(small, std::max(m.t_lo, 1e-300))), std::log(split), true);
  result += converge(std::max(split, m.t_lo), std::min(big, m.t_hi), false);
  return result;
}

}  // namespace

Matrix mat_exp(const Matrix& a) {
  require_square(a, "mat_exp");
  return a.exp();
}

Matrix mat_log(const Matrix& a) {
  require_square(a, "mat_log");
  require_off_branch_cut(a, "mat_log");
  return a.log();
}

Matrix mat_sqrt(const Matrix& a) {
  require_square(a, "mat_sqrt");
  require_off_branch_cut(a, "mat_sqrt");
  return a.sqrt();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

Matrix kron_sum(const Matrix& a, const Matrix& b) {
  require_square(a, "kron_sum");
  require_square(b, "kron_sum");
  return kron(a, Matrix::Identity(b.rows(), b.rows())) + kron(Matrix::Identity(a.rows(), a.rows()), b);
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    std::ostringstream os;
    os << "unvec: vector of length " << v.size() << " cannot be reshaped to " << rows << "x" << cols;
    throw ContractError(os.str());
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double default_spectrum_margin(double rmax) { return std::isfinite(rmax) ? 1e-9 * std::max(1.0, rmax) : 0.0; }

SpectrumReport spectrum_check(const SubordinatorModel& model, const Matrix& a, double scale,
                              std::optional<double> margin) {
  require_square(a, "spectrum_check");
  SpectrumReport report;
  report.r_max = r_max(model);
  report.eigenvalues = eigenvalues(scale * a);
  report.max_real_part = 0.0;
  for (const auto& lambda : report.eigenvalues) report.max_real_part = std::max(report.max_real_part, lambda.real());
  report.margin_to_rmax = report.r_max - report.max_real_part;
  const double required = margin.value_or(default_spectrum_margin(report.r_max));
  report.passes = report.max_real_part < report.r_max - required;
  return report;
}

Matrix beta_matrix(const SubordinatorModel& model, const Matrix& a) {
  require_square(a, "beta_matrix");
  auto report = spectrum_check(model, a);
  if (!report.passes) {
    std::ostringstream os;
    os << "beta(A) undefined for the " << model.family() << " clock: spectrum reaches Re = " << report.max_real_part
       << ", r_max = " << report.r_max;
    throw SpectrumDomainError(os.str(), std::move(report));
  }
  const Index n = a.rows();
  const Matrix eye = Matrix::Identity(n, n);
  const auto& law = model.law();
  if (const auto* d = std::get_if<Deterministic>(&law)) return d->b * a;
  if (const auto* p = std::get_if<Poisson>(&law)) return p->gamma * (mat_exp(a) - eye);
  if (const auto* g = std::get_if<GammaClock>(&law)) return -g->delta * mat_log(eye - a / g->gamma);
  if (const auto* ig = std::get_if<InverseGaussian>(&law)) {
    const double g2 = ig->gamma * ig->gamma;
    return ig->delta * (ig->gamma * eye - mat_sqrt(g2 * eye - 2.0 * a));
  }
  return numeric_beta_matrix(std::get<NumericMeasure>(law), a, report.max_real_part);
}

}  // namespace tcc
