#include "deconv/ecdf.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "deconv/error.hpp"
#include "deconv/quadrature.hpp"

namespace deconv {

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw DomainError("an empirical distribution needs at least one value");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

Ecdf residual_ecdf(const ResidualSet& residuals) { return Ecdf(residuals.values); }

ErrorModel::ErrorModel(Kind kind) : kind_(kind) {
  if (const auto* n = std::get_if<NormalErrors>(&kind_)) {
    if (!(n->sd >= 0.0)) throw DomainError("normal error sd must be non-negative");
  } else {
    const auto& t = std::get<StudentTErrors>(kind_);
    if (t.df <= 2) throw DomainError("t errors need df > 2 for a finite variance");
    if (!(t.sd > 0.0)) throw DomainError("t error sd must be positive");
    t_scale_ = t.sd / std::sqrt(t.df / (t.df - 2.0));
  }
}

double ErrorModel::sd() const {
  return std::visit([](const auto& k) { return k.sd; }, kind_);
}

double ErrorModel::pdf(double t) const {
  if (const auto* n = std::get_if<NormalErrors>(&kind_)) {
    if (n->sd == 0.0) return 0.0;
    const double z = t / n->sd;
    return std::exp(-0.5 * z * z) / (n->sd * std::sqrt(2.0 * std::numbers::pi));
  }
  const auto& st = std::get<StudentTErrors>(kind_);
  return boost::math::pdf(boost::math::students_t(st.df), t / t_scale_) / t_scale_;
}

double ErrorModel::cdf(double t) const {
  if (const auto* n = std::get_if<NormalErrors>(&kind_)) {
    if (n->sd == 0.0) return t >= 0.0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-t / (n->sd * std::numbers::sqrt2));
  }
  const auto& st = std::get<StudentTErrors>(kind_);
  return boost::math::cdf(boost::math::students_t(st.df), t / t_scale_);
}

double ErrorModel::partial_mean(double t) const {
  if (const auto* n = std::get_if<NormalErrors>(&kind_)) {
    return -n->sd * n->sd * pdf(t);
  }
  // For a standard t_v variate: int_{-inf}^z x f(x) dx = -(v + z^2)/(v - 1) f(z).
  const auto& st = std::get<StudentTErrors>(kind_);
  const double z = t / t_scale_;
  const double fz = boost::math::pdf(boost::math::students_t(st.df), z);
  return -t_scale_ * (st.df + z * z) / (st.df - 1.0) * fz;
}

double ErrorModel::sample(std::mt19937_64& rng) const {
  if (const auto* n = std::get_if<NormalErrors>(&kind_)) {
    if (n->sd == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, n->sd)(rng);
  }
  const auto& st = std::get<StudentTErrors>(kind_);
  return t_scale_ * std::student_t_distribution<double>(st.df)(rng);
}

double asymptotic_covariance(const ErrorModel& model, double u, double v) {
  const double fu = model.pdf(u);
  const double fv = model.pdf(v);
  return model.cdf(std::min(u, v)) - model.cdf(u) * model.cdf(v) + fu * model.partial_mean(v) +
         fv * model.partial_mean(u) + model.variance() * fu * fv;
}

double asymptotic_aimse(const ErrorModel& model) {
  const auto integrand = [&](double t) { return asymptotic_covariance(model, t, t); };
  // Grow the range until the integrand drops below 1e-12 at both ends.
  double limit = 4.0 * std::max(model.sd(), 1e-3);
  while (std::max(integrand(limit), integrand(-limit)) > 1e-12) {
    limit *= 2.0;
    if (limit > 1e8) throw IntegrationError("asymptotic_aimse: integrand does not decay");
  }
  // Geometric panels keep the heavy-tailed case cheap.
  double total = 0.0;
  double lo = 0.0;
  double hi = std::max(std::min(limit, model.sd()), 1e-3);
  while (lo < limit) {
    total += adaptive_simpson(integrand, lo, hi, 1e-12) + adaptive_simpson(integrand, -hi, -lo, 1e-12);
    lo = hi;
    hi = std::min(limit, 2.0 * hi);
  }
  return total;
}

}  // namespace deconv
