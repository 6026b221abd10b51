#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace deconv {

/// 1 on |u| <= flat_radius, (|u|/flat_radius)^-decay_exponent up to
/// hard_cutoff, 0 beyond.
struct PaperSimKernel {
  double flat_radius = 7.0;
  double decay_exponent = 6.0;
  double hard_cutoff = std::numeric_limits<double>::infinity();
};

/// Indicator of |u| <= radius.
struct SpectralCutoffKernel {
  double radius = 1.0;
};

struct CustomKernel {
  std::function<double(double)> profile;
  double flat_radius = 1.0;
};

/// Fourier-domain smoothing kernel Lambda. The estimator evaluates it at the
/// shrunken frequency u = h k.
class SmoothingKernelSpec {
 public:
  using Kind = std::variant<PaperSimKernel, SpectralCutoffKernel, CustomKernel>;

  SmoothingKernelSpec(Kind kind);  // NOLINT(google-explicit-constructor)

  static SmoothingKernelSpec paper_sim(double flat_radius = 7.0, double decay_exponent = 6.0);
  static SmoothingKernelSpec spectral_cutoff(double radius);
  static SmoothingKernelSpec custom(std::function<double(double)> profile, double flat_radius);

  const Kind& kind() const { return kind_; }
  double flat_radius() const;
  std::string name() const;

  /// The profile as defined, without forcing the flat region.
  double raw_profile(double u) const;

 private:
  Kind kind_;
};

struct AssumptionProfile {
  double smoothness_s = 3.0;
  double ill_posedness_b = 2.0;
  double moment_kappa = 4.0;
  double holder_gamma = 1.0;

  /// Throws DomainError when s < 1, gamma outside (0,1] or kappa <= 2 + 1/(s+b).
  void validate() const;
};

/// Lambda(u). Exactly 1 on the flat region for every kernel kind.
double lambda_eval(const SmoothingKernelSpec& spec, double u);

struct ValidationReport {
  bool flat_region_ok = false;
  bool bounded_ok = false;
  bool moment_finite = false;
  double moment_sum = 0.0;  ///< sum_{|k| <= working range} |k|^b |Lambda(k)|
  /// Smoothness window (lower, upper) implied by the kernel, when it has one.
  std::optional<std::pair<double, double>> smoothness_window;
  /// Set when a profile was supplied; false flags s outside the window.
  std::optional<bool> profile_in_window;
  std::vector<std::string> failures;

  bool usable() const { return flat_region_ok && bounded_ok && moment_finite; }
};

ValidationReport validate_assumption(const SmoothingKernelSpec& spec, double b, int working_range,
                                     const std::optional<AssumptionProfile>& profile = std::nullopt);

}  // namespace deconv
