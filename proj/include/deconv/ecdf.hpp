#pragma once

#include <random>
#include <span>
#include <variant>
#include <vector>

#include "deconv/estimator.hpp"

namespace deconv {

/// Right-continuous empirical distribution function.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);

  double operator()(double t) const;
  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted_values() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

Ecdf residual_ecdf(const ResidualSet& residuals);

struct NormalErrors {
  double sd = 1.0;
};
/// Student t with `df` degrees of freedom rescaled to standard deviation `sd`
/// (requires df > 2).
struct StudentTErrors {
  int df = 4;
  double sd = 1.0;
};

class ErrorModel {
 public:
  using Kind = std::variant<NormalErrors, StudentTErrors>;

  explicit ErrorModel(Kind kind);
  static ErrorModel normal(double sd) { return ErrorModel(NormalErrors{sd}); }
  static ErrorModel student_t(int df, double sd) { return ErrorModel(StudentTErrors{df, sd}); }

  const Kind& kind() const { return kind_; }
  double sd() const;
  double variance() const { return sd() * sd(); }

  double pdf(double t) const;
  double cdf(double t) const;
  /// E[eps 1(eps <= t)].
  double partial_mean(double t) const;

  double sample(std::mt19937_64& rng) const;

 private:
  Kind kind_;
  double t_scale_ = 1.0;  ///< multiplier on a standard t variate
};

/// Sigma(u, v) = F(min) - F(u)F(v) + f(u) E[eps 1(eps<=v)] + f(v) E[eps 1(eps<=u)]
///               + sigma^2 f(u) f(v).
double asymptotic_covariance(const ErrorModel& model, double u, double v);

/// int Sigma(t, t) dt by adaptive quadrature.
double asymptotic_aimse(const ErrorModel& model);

}  // namespace deconv
