#include "tcc/clock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "numeric_measure.hpp"
#include "tcc/error.hpp"

namespace tcc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ContractError(std::string("clock parameter ") + what + " must be finite and > 0, got " +
                        std::to_string(value));
  }
}

const detail::NumericMeasureCache& cache_of(const SubordinatorModel& model) {
  return *model.numeric_cache();
}

}  // namespace

SubordinatorModel::SubordinatorModel(Law law) : law_(std::move(law)) {
  std::visit(Overloaded{
                 [](const Deterministic& d) { require_positive(d.b, "b"); },
                 [](const Poisson& p) { require_positive(p.gamma, "gamma"); },
                 [](const GammaClock& g) {
                   require_positive(g.delta, "delta");
                   require_positive(g.gamma, "gamma");
                 },
                 [](const InverseGaussian& ig) {
                   require_positive(ig.delta, "delta");
                   require_positive(ig.gamma, "gamma");
                 },
                 [this](const NumericMeasure& m) {
                   if (!m.density) throw ContractError("numeric clock requires a Levy density");
                   if (!(m.b >= 0.0) || !std::isfinite(m.b)) throw ContractError("numeric clock drift b must be >= 0");
                   if (!(m.t_lo >= 0.0) || !(m.t_lo < m.t_hi)) {
                     throw ContractError("numeric clock support must satisfy 0 <= t_lo < t_hi");
                   }
                   double small_jump_mass = 0.0;
                   try {
                     small_jump_mass = detail::integrate_measure(m, [](double t) { return std::min(t, 1.0); });
                   } catch (const NumericalError& e) {
                     throw ContractError(std::string("int min{t,1} lambda(dt) is not finite: ") + e.what());
                   }
                   if (m.b == 0.0 && !(small_jump_mass > 0.0)) {
                     throw ContractError("numeric clock with b = 0 needs positive Levy mass on its support");
                   }
                   cache_ = std::make_shared<const detail::NumericMeasureCache>(detail::build_cache(m));
                 },
             },
             law_);
}

double SubordinatorModel::drift() const noexcept {
  return std::visit(Overloaded{
                        [](const Deterministic& d) { return d.b; },
                        [](const NumericMeasure& m) { return m.b; },
                        [](const auto&) { return 0.0; },
                    },
                    law_);
}

bool SubordinatorModel::strictly_increasing() const noexcept {
  return std::visit(Overloaded{
                        [](const Poisson&) { return false; },
                        [this](const NumericMeasure& m) { return m.b > 0.0 || !std::isfinite(cache_->total_mass); },
                        [](const auto&) { return true; },
                    },
                    law_);
}

std::string SubordinatorModel::family() const {
  return std::visit(Overloaded{
                        [](const Deterministic&) { return std::string("deterministic"); },
                        [](const Poisson&) { return std::string("poisson"); },
                        [](const GammaClock&) { return std::string("gamma"); },
                        [](const InverseGaussian&) { return std::string("inverse_gaussian"); },
                        [](const NumericMeasure&) { return std::string("numeric"); },
                    },
                    law_);
}

double laplace_exponent(const SubordinatorModel& model, double z) {
  if (!(z >= 0.0)) throw ContractError("laplace_exponent requires z >= 0, got " + std::to_string(z));
  return std::visit(Overloaded{
                        [z](const Deterministic& d) { return d.b * z; },
                        [z](const Poisson& p) { return -p.gamma * std::expm1(-z); },
                        [z](const GammaClock& g) { return g.delta * std::log1p(z / g.gamma); },
                        [z](const InverseGaussian& ig) {
                          // delta (sqrt(gamma^2 + 2z) - gamma) without cancellation
                          return ig.delta * 2.0 * z / (std::sqrt(ig.gamma * ig.gamma + 2.0 * z) + ig.gamma);
                        },
                        [z](const NumericMeasure& m) {
                          return m.b * z - detail::integrate_measure(m, [z](double t) { return std::expm1(-z * t); });
                        },
                    },
                    model.law());
}

double r_max(const SubordinatorModel& model) {
  return std::visit(Overloaded{
                        [](const Deterministic&) { return kInf; },
                        [](const Poisson&) { return kInf; },
                        [](const GammaClock& g) { return g.gamma; },
                        [](const InverseGaussian& ig) { return 0.5 * ig.gamma * ig.gamma; },
                        [&model](const NumericMeasure&) { return cache_of(model).r_max; },
                    },
                    model.law());
}

std::complex<double> beta_scalar(const SubordinatorModel& model, std::complex<double> z) {
  using C = std::complex<double>;
  const double rmax = r_max(model);
  if (!(z.real() < rmax)) {
    std::ostringstream os;
    os << "beta(z) undefined: Re z = " << z.real() << " >= r_max = " << rmax;
    throw DomainError(os.str());
  }
  const bool real = z.imag() == 0.0;
  const double x = z.real();
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) -> C { return d.b * z; },
          [&](const Poisson& p) -> C {
            if (real) return p.gamma * std::expm1(x);
            return p.gamma * (std::exp(z) - 1.0);
          },
          [&](const GammaClock& g) -> C {
            if (real) return -g.delta * std::log1p(-x / g.gamma);
            return -g.delta * std::log(1.0 - z / g.gamma);
          },
          [&](const InverseGaussian& ig) -> C {
            // delta (gamma - sqrt(gamma^2 - 2z)) = 2 delta z / (gamma + sqrt(gamma^2 - 2z))
            const double g2 = ig.gamma * ig.gamma;
            if (real) return ig.delta * 2.0 * x / (ig.gamma + std::sqrt(g2 - 2.0 * x));
            return ig.delta * 2.0 * z / (ig.gamma + std::sqrt(C(g2) - 2.0 * z));
          },
          [&](const NumericMeasure& m) -> C {
            if (real) return m.b * x + detail::integrate_measure(m, [x](double t) { return std::expm1(x * t); });
            const double y = z.imag();
            const double re = detail::integrate_measure(m, [x, y](double t) {
              // exp(xt) cos(yt) - 1, written to keep precision for small t
              return std::expm1(x * t) * std::cos(y * t) - 2.0 * std::pow(std::sin(0.5 * y * t), 2);
            });
            const double im = detail::integrate_measure(m, [x, y](double t) { return std::exp(x * t) * std::sin(y * t); });
            return m.b * z + C(re, im);
          },
      },
      model.law());
}

double beta_real(const SubordinatorModel& model, double z) { return beta_scalar(model, {z, 0.0}).real(); }

double mean_rate(const SubordinatorModel& model) {
  return std::visit(Overloaded{
                        [](const Deterministic& d) { return d.b; },
                        [](const Poisson& p) { return p.gamma; },
                        [](const GammaClock& g) { return g.delta / g.gamma; },
                        [](const InverseGaussian& ig) { return ig.delta / ig.gamma; },
                        [&model](const NumericMeasure& m) {
                          const auto& cache = cache_of(model);
                          if (std::isnan(cache.first_moment)) {
                            throw NumericalError("first moment of the Levy measure diverges: " + cache.first_moment_error);
                          }
                          return m.b + cache.first_moment;
                        },
                    },
                    model.law());
}

double sample_increment(const SubordinatorModel& model, double ds, Engine& rng) {
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) { return d.b * ds; },
          [&](const Poisson& p) {
            return static_cast<double>(std::poisson_distribution<long long>(p.gamma * ds)(rng));
          },
          [&](const GammaClock& g) { return std::gamma_distribution<double>(g.delta * ds, 1.0 / g.gamma)(rng); },
          [&](const InverseGaussian& ig) {
            // Michael-Schucany-Haas: IG(mean mu, shape lambda) with mu = delta ds / gamma,
            // lambda = (delta ds)^2.
            const double level = ig.delta * ds;
            const double mu = level / ig.gamma;
            const double shape = level * level;
            const double nu = std::normal_distribution<double>()(rng);
            const double w = mu * nu * nu / (2.0 * shape);
            const double root = mu / (1.0 + w + std::sqrt(w * (w + 2.0)));
            const double u = std::uniform_real_distribution<double>()(rng);
            return u <= mu / (mu + root) ? root : mu * mu / root;
          },
          [&](const NumericMeasure&) {
            const auto& cache = cache_of(model);
            if (!cache.sampler_ready) throw NumericalError("numeric clock sampler unavailable: " + cache.sampler_error);
            const auto jumps = std::poisson_distribution<long long>(cache.jump_rate * ds)(rng);
            double total = cache.effective_drift * ds;
            std::uniform_real_distribution<double> unif;
            for (long long j = 0; j < jumps; ++j) total += detail::draw_jump(cache, unif(rng));
            return total;
          },
      },
      model.law());
}

SubordinatorPath sample_path(const SubordinatorModel& model, double ds, std::size_t n_steps, std::uint64_t seed) {
  if (!(ds > 0.0)) throw ContractError("sample_path requires ds > 0");
  if (n_steps < 1) throw ContractError("sample_path requires n_steps >= 1");
  SubordinatorPath path;
  path.ds = ds;
  path.drift = model.drift();
  path.seed = seed;
  path.tau.resize(n_steps + 1);
  path.tau[0] = 0.0;
  Engine rng = make_engine(seed);
  for (std::size_t k = 0; k < n_steps; ++k) path.tau[k + 1] = path.tau[k] + sample_increment(model, ds, rng);
  return path;
}

InverseClockPath::InverseClockPath(SubordinatorPath path) : path_(std::move(path)) {
  if (path_.tau.size() < 2 || path_.tau.front() != 0.0) throw ContractError("clock path must start at tau = 0");
  for (std::size_t k = 0; k + 1 < path_.tau.size(); ++k) {
    if (!(path_.tau[k + 1] >= path_.tau[k])) {
      throw ContractError("clock path decreases at node " + std::to_string(k));
    }
    if (path_.tau[k + 1] == path_.tau[k]) tied_.push_back(k + 1);
  }
}

double InverseClockPath::operator()(double t) const {
  const auto& tau = path_.tau;
  if (!(t >= 0.0) || t > tau.back()) {
    throw ContractError("zeta(t) queried outside [0, " + std::to_string(tau.back()) + "]: t = " + std::to_string(t));
  }
  const auto it = std::lower_bound(tau.begin(), tau.end(), t);
  const auto j = static_cast<std::size_t>(it - tau.begin());
  if (*it == t) return static_cast<double>(j) * path_.ds;
  const std::size_t k = j - 1;
  const double offset = t - tau[k];
  const double drift_len = path_.drift * path_.ds;
  const double next = static_cast<double>(j) * path_.ds;
  if (offset < drift_len) return std::min(static_cast<double>(k) * path_.ds + offset / path_.drift, next);
  return next;
}

InverseClockPath inverse_path(SubordinatorPath path) { return InverseClockPath(std::move(path)); }

}  // namespace tcc
