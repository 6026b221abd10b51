#include "deconv/estimator.hpp"

#include <cmath>
#include <string>

#include "deconv/error.hpp"
#include "deconv/simd/kernels.hpp"

namespace deconv {

std::vector<double> kernel_weights(const SmoothingKernelSpec& kernel, double h, int n) {
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) w[static_cast<std::size_t>(k)] = lambda_eval(kernel, h * k);
  return w;
}

namespace {

void check_kernel(const SmoothingKernelSpec& kernel, double b, int n) {
  const int range = std::max(n, static_cast<int>(std::ceil(kernel.flat_radius())));
  const ValidationReport report = validate_assumption(kernel, b, range);
  if (!report.usable()) {
    std::string what = "kernel " + kernel.name() + " fails validation:";
    for (const auto& f : report.failures) what += " " + f + ";";
    throw ValidationError(what);
  }
}

}  // namespace

RegularizedEstimate estimate_theta(const SpectralCoefficients& empirical,
                                   const DistortionOperator& distortion,
                                   const SmoothingKernelSpec& kernel, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("regularization h must be positive");
  const int n = empirical.max_freq();
  require_invertible(distortion.psi(), n);
  check_kernel(kernel, distortion.spec().ill_posedness_b, n);

  RegularizedEstimate est;
  est.coefficients = SpectralCoefficients(n);
  est.psi = SpectralCoefficients(n);
  for (int k = -n; k <= n; ++k) {
    est.psi[k] = distortion.psi()[k];
    est.coefficients[k] = lambda_eval(kernel, h * k) * empirical[k] / est.psi[k];
  }
  est.regularization_h = h;
  est.kernel = kernel;
  return est;
}

RegularizedEstimate estimate_theta(const Sample& sample, const DistortionOperator& distortion,
                                   const SmoothingKernelSpec& kernel, double h) {
  return estimate_theta(empirical_fourier_coefficients(sample, sample.n()), distortion, kernel, h);
}

std::vector<double> fitted_values(const RegularizedEstimate& estimate, const Sample& sample) {
  if (estimate.max_freq() != sample.n()) {
    throw ShapeError("estimate range " + std::to_string(estimate.max_freq()) +
                     " does not match sample half-count " + std::to_string(sample.n()));
  }
  return evaluate_series(apply_convolution(estimate.coefficients, estimate.psi), sample.grid().points());
}

ResidualSet residuals(const Sample& sample, const RegularizedEstimate& estimate) {
  ResidualSet out;
  out.values = fitted_values(estimate, sample);
  const auto y = sample.responses();
  for (std::size_t j = 0; j < y.size(); ++j) out.values[j] = y[j] - out.values[j];
  out.source_h = estimate.regularization_h;
  return out;
}

double ise(const RegularizedEstimate& estimate, const SpectralCoefficients& truth, double truth_tail_energy) {
  const int common = std::min(estimate.max_freq(), truth.max_freq());
  double total = truth_tail_energy;
  for (int k = -common; k <= common; ++k) total += std::norm(estimate.coefficients[k] - truth[k]);
  for (int k = common + 1; k <= estimate.max_freq(); ++k) {
    total += std::norm(estimate.coefficients[k]) + std::norm(estimate.coefficients[-k]);
  }
  for (int k = common + 1; k <= truth.max_freq(); ++k) total += std::norm(truth[k]) + std::norm(truth[-k]);
  return total;
}

double integrated_variance_formula(double sigma_sq, const SmoothingKernelSpec& kernel,
                                   const SpectralCoefficients& psi, double h, int n) {
  if (n > psi.max_freq()) throw FrequencyOverflowError("psi does not cover |k| <= n");
  std::vector<double> w(static_cast<std::size_t>(2 * n + 1));
  std::vector<Complex> inv_psi(w.size());
  for (int k = -n; k <= n; ++k) {
    const double lam = lambda_eval(kernel, h * k);
    w[static_cast<std::size_t>(k + n)] = lam * lam;
    inv_psi[static_cast<std::size_t>(k + n)] = 1.0 / psi[k];
  }
  return sigma_sq / (2.0 * n + 1.0) * simd::weighted_energy(w, inv_psi);
}

double rule_of_thumb_h(const AssumptionProfile& profile, double c_lambda, double c_r, double sigma_sq,
                       int n) {
  if (!(c_lambda > 0.0) || !(c_r > 0.0) || !(sigma_sq > 0.0) || n < 1 || !(profile.smoothness_s > 0.0) ||
      !(profile.ill_posedness_b > 0.0)) {
    throw DomainError("rule_of_thumb_h needs positive constants, smoothness and ill-posedness");
  }
  const double s = profile.smoothness_s;
  const double b = profile.ill_posedness_b;
  const double r = 1.0 / (2.0 * s + 2.0 * b + 1.0);
  const double lead = (2.0 * b + 1.0) / (2.0 * s) * c_lambda / c_r * sigma_sq;
  return std::pow(lead, r) * std::pow(2.0 * n + 1.0, -r);
}

double pilot_regularization(double constant, int n, double exponent) {
  if (!(constant > 0.0) || n < 1) throw DomainError("pilot needs a positive constant and n >= 1");
  const double size = 2.0 * n + 1.0;
  return constant * std::pow(size, -exponent) * std::pow(std::log(size), exponent);
}

}  // namespace deconv
