#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "deconv/estimator.hpp"

namespace deconv {

/// pen(m) = running maximum of the empirical (1 - 1/(2n+1)) quantile of
/// sum_{|k|<=m} sigma_k^2 (Z_k^2 - 1) over `draws` standard-normal vectors.
struct MonteCarloPenalty {
  int draws = 10000;
};

/// scale * (2 sqrt(x sum sigma_k^4) + 2 x max sigma_k^2), x = log(2n+1): the
/// Laurent-Massart upper bound on the same quantile.
struct ApproximateScaledPenalty {
  double scale = 0.1;
};

/// pen = 0; with alpha = 0 the criterion is the unbiased risk estimate.
struct NoPenalty {};

using RiskHullPenalty = std::variant<MonteCarloPenalty, ApproximateScaledPenalty, NoPenalty>;

struct RiskHullConfig {
  double alpha = 1.1;
  RiskHullPenalty penalty = MonteCarloPenalty{};
  std::optional<int> max_cutoff;  ///< defaults to n
  std::uint64_t rng_seed = 0;

  void validate(int n) const;
};

struct RiskHullSelection {
  int cutoff = 0;
  std::vector<double> criterion;  ///< U(m), m = 0..max_cutoff
  std::vector<double> penalty;    ///< pen(m)
};

/// Minimizes U(m) = -sum_{|k|<=m} |R(k)/Psi(k)|^2 + 2 sum_{|k|<=m} s_k^2 + (1+alpha) pen(m),
/// s_k^2 = sigma_sq_hat / ((2n+1) |Psi(k)|^2). Ties go to the smaller cutoff.
RiskHullSelection select_cutoff_risk_hull(const Sample& sample, const DistortionOperator& distortion,
                                          double sigma_sq_hat, const RiskHullConfig& config);

/// Regularization that makes the unit spectral cut-off pass exactly |k| <= m.
double cutoff_regularization(int m);

/// Estimate with pass band |k| <= m.
RegularizedEstimate spectral_cutoff_estimate(const Sample& sample, const DistortionOperator& distortion, int m);

}  // namespace deconv
