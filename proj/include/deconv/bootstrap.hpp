#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "deconv/estimator.hpp"

namespace deconv {

struct StandardNormalContaminant {};

/// A user-supplied contaminant law: density w, its CDF, a sampler and the
/// first two moments (mean must be 0).
struct CustomContaminant {
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(std::mt19937_64&)> sampler;
  double variance = 1.0;
};

using Contaminant = std::variant<StandardNormalContaminant, CustomContaminant>;

struct BootstrapConfig {
  int replications = 200;
  Contaminant contaminant = StandardNormalContaminant{};
  /// Explicit c_n; Silverman's rule on the centered pilot residuals when empty.
  std::optional<double> scaling_c_n;
  std::uint64_t rng_seed = 0;
  /// Share bootstrap error draws across candidate g values.
  bool common_random_numbers = true;
  unsigned threads = 1;

  void validate() const;
};

/// Law of eps* = eps~_J + c_n U, J uniform over the centered residuals.
class SmoothErrorDistribution {
 public:
  SmoothErrorDistribution(std::vector<double> centered_residuals, double c_n,
                          Contaminant contaminant = StandardNormalContaminant{});

  std::span<const double> centered_residuals() const { return centered_; }
  double c_n() const { return c_n_; }

  double cdf(double t) const;
  double density(double t) const;
  /// E*[eps* 1(eps* <= t)].
  double partial_mean(double t) const;
  /// var(eps~) + c_n^2 var(U), population form.
  double variance() const;

  void sample(std::span<double> out, std::mt19937_64& rng) const;
  std::vector<double> sample(std::size_t count, std::mt19937_64& rng) const;

 private:
  double contaminant_cdf(double z) const;
  double contaminant_density(double z) const;

  std::vector<double> centered_;
  double c_n_;
  Contaminant contaminant_;
};

struct SelectionGrid {
  double lower = 0.0;
  double upper = 1.0;
  int count = 100;

  /// [ (2n+1)^-1/10, 10 (2n+1)^-1/12 log^1/12(2n+1) ].
  static SelectionGrid standard(int n, int count = 100);
  void validate() const;
  std::vector<double> points() const;
};

struct SelectionResult {
  double g_opt = 0.0;
  std::size_t index = 0;
  std::vector<double> candidates;
  std::vector<double> objective_curve;
  std::vector<double> standard_errors;  ///< Monte-Carlo standard error per candidate
  double c_n = 0.0;
};

std::vector<double> center_residuals(std::span<const double> residuals);
inline std::vector<double> center_residuals(const ResidualSet& r) { return center_residuals(r.values); }

/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> values);

/// 1.06 * sample sd * length^(-1/5).
double silverman_cn(std::span<const double> centered);

std::vector<double> sample_smooth_errors(const SmoothErrorDistribution& dist, std::size_t count,
                                         std::mt19937_64& rng);
double smooth_cdf(const SmoothErrorDistribution& dist, double t);
double smooth_density(const SmoothErrorDistribution& dist, double t);

/// Builds the smooth law from the pilot's residuals on `sample`.
SmoothErrorDistribution smooth_error_distribution(const Sample& sample, const RegularizedEstimate& pilot,
                                                  const BootstrapConfig& config);

/// IMSE*(g) = int E*[(theta*_g - theta_pilot)^2], Monte-Carlo over B draws.
double bootstrap_imse(const Sample& sample, const RegularizedEstimate& pilot, double g,
                      const SmoothingKernelSpec& kernel, const DistortionOperator& distortion,
                      const BootstrapConfig& config);

/// IMSE* over arbitrary candidates; argmin with ties to the smallest g.
SelectionResult select_g_opt(const Sample& sample, const RegularizedEstimate& pilot,
                             std::span<const double> candidates, const SmoothingKernelSpec& kernel,
                             const DistortionOperator& distortion, const BootstrapConfig& config);

SelectionResult select_g_opt(const Sample& sample, const RegularizedEstimate& pilot, const SelectionGrid& grid,
                             const SmoothingKernelSpec& kernel, const DistortionOperator& distortion,
                             const BootstrapConfig& config);

/// Index of the smallest value, first occurrence; candidates must ascend.
std::size_t argmin_first(std::span<const double> values);

}  // namespace deconv
