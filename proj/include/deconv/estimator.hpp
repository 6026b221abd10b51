#pragma once

#include <span>
#include <vector>

#include "deconv/kernel.hpp"
#include "deconv/spectral.hpp"

namespace deconv {

/// theta_hat as Fourier coefficients Lambda(h k) R(k) / Psi(k), |k| <= n.
struct RegularizedEstimate {
  SpectralCoefficients coefficients;
  double regularization_h = 0.0;
  SmoothingKernelSpec kernel = SmoothingKernelSpec::paper_sim();
  SpectralCoefficients psi;  ///< distortion coefficients over the same range

  int max_freq() const { return coefficients.max_freq(); }
  double operator()(double x) const { return evaluate_series(coefficients, x); }
};

struct ResidualSet {
  std::vector<double> values;
  double source_h = 0.0;
};

/// Lambda(h k) for k = 0..n.
std::vector<double> kernel_weights(const SmoothingKernelSpec& kernel, double h, int n);

RegularizedEstimate estimate_theta(const Sample& sample, const DistortionOperator& distortion,
                                   const SmoothingKernelSpec& kernel, double h);

/// Same, from precomputed empirical coefficients (|k| <= n).
RegularizedEstimate estimate_theta(const SpectralCoefficients& empirical,
                                   const DistortionOperator& distortion,
                                   const SmoothingKernelSpec& kernel, double h);

/// [K theta_hat](x_j) at the design points of `sample`.
std::vector<double> fitted_values(const RegularizedEstimate& estimate, const Sample& sample);

ResidualSet residuals(const Sample& sample, const RegularizedEstimate& estimate);

/// Squared L2 distance between theta_hat and the truth. Truth coefficients past
/// the estimate's range count in full; `truth_tail_energy` is the truth's
/// energy beyond its own stored range.
double ise(const RegularizedEstimate& estimate, const SpectralCoefficients& truth,
           double truth_tail_energy = 0.0);

/// sigma^2 (2n+1)^-1 sum_{|k|<=n} Lambda^2(h k) / |Psi(k)|^2.
double integrated_variance_formula(double sigma_sq, const SmoothingKernelSpec& kernel,
                                   const SpectralCoefficients& psi, double h, int n);

/// Rule-of-thumb regularization
///   ((2b+1)/(2s) * C_Lambda/C_R * sigma^2)^(1/(2s+2b+1)) * (2n+1)^(-1/(2s+2b+1)).
double rule_of_thumb_h(const AssumptionProfile& profile, double c_lambda, double c_r, double sigma_sq,
                       int n);

/// Pilot sequence c (2n+1)^-r log^r(2n+1), r = 1/11 by default (s = 3, b = 2).
double pilot_regularization(double constant, int n, double exponent = 1.0 / 11.0);

}  // namespace deconv
