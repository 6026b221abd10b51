#include "deconv/kernel.hpp"

#include <cmath>

#include "deconv/error.hpp"

namespace deconv {

SmoothingKernelSpec::SmoothingKernelSpec(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PaperSimKernel>) {
          if (!(k.flat_radius > 0.0) || !(k.decay_exponent > 0.0) || !(k.hard_cutoff >= k.flat_radius)) {
            throw DomainError("paper_sim kernel needs flat_radius > 0, decay > 0, cutoff >= flat_radius");
          }
        } else if constexpr (std::is_same_v<T, SpectralCutoffKernel>) {
          if (!(k.radius > 0.0)) throw DomainError("spectral cut-off radius must be positive");
        } else {
          if (!k.profile) throw DomainError("custom kernel needs a profile");
          if (!(k.flat_radius > 0.0)) throw DomainError("custom kernel flat radius must be positive");
        }
      },
      kind_);
}

SmoothingKernelSpec SmoothingKernelSpec::paper_sim(double flat_radius, double decay_exponent) {
  return SmoothingKernelSpec(PaperSimKernel{flat_radius, decay_exponent});
}

SmoothingKernelSpec SmoothingKernelSpec::spectral_cutoff(double radius) {
  return SmoothingKernelSpec(SpectralCutoffKernel{radius});
}

SmoothingKernelSpec SmoothingKernelSpec::custom(std::function<double(double)> profile, double flat_radius) {
  return SmoothingKernelSpec(CustomKernel{std::move(profile), flat_radius});
}

double SmoothingKernelSpec::flat_radius() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SpectralCutoffKernel>) {
          return k.radius;
        } else {
          return k.flat_radius;
        }
      },
      kind_);
}

std::string SmoothingKernelSpec::name() const {
  switch (kind_.index()) {
    case 0:
      return "paper_sim";
    case 1:
      return "spectral_cutoff";
    default:
      return "custom";
  }
}

double SmoothingKernelSpec::raw_profile(double u) const {
  const double a = std::abs(u);
  return std::visit(
      [a, u](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PaperSimKernel>) {
          if (a <= k.flat_radius) return 1.0;
          if (a > k.hard_cutoff) return 0.0;
          return std::pow(a / k.flat_radius, -k.decay_exponent);
        } else if constexpr (std::is_same_v<T, SpectralCutoffKernel>) {
          return a <= k.radius ? 1.0 : 0.0;
        } else {
          return k.profile(u);
        }
      },
      kind_);
}

double lambda_eval(const SmoothingKernelSpec& spec, double u) {
  if (std::abs(u) <= spec.flat_radius()) return 1.0;
  return spec.raw_profile(u);
}

void AssumptionProfile::validate() const {
  if (!(smoothness_s >= 1.0)) throw DomainError("smoothness s must be >= 1");
  if (!(ill_posedness_b > 0.0)) throw DomainError("ill-posedness b must be positive");
  if (!(holder_gamma > 0.0 && holder_gamma <= 1.0)) throw DomainError("Holder gamma must lie in (0, 1]");
  if (!(moment_kappa > 2.0 + 1.0 / (smoothness_s + ill_posedness_b))) {
    throw DomainError("moment order kappa must exceed 2 + 1/(s + b)");
  }
}

ValidationReport validate_assumption(const SmoothingKernelSpec& spec, double b, int working_range,
                                     const std::optional<AssumptionProfile>& profile) {
  const double flat = spec.flat_radius();
  if (working_range < flat) throw DomainError("working range must cover the flat region");
  if (!(b > 0.0)) throw DomainError("ill-posedness b must be positive");

  ValidationReport report;
  report.flat_region_ok = true;
  for (int k = -static_cast<int>(std::floor(flat)); k <= static_cast<int>(std::floor(flat)); ++k) {
    if (std::abs(spec.raw_profile(k) - 1.0) > 1e-12) {
      report.flat_region_ok = false;
      report.failures.push_back("Lambda(" + std::to_string(k) + ") != 1 inside the flat region");
      break;
    }
  }

  report.bounded_ok = true;
  double tail = 0.0;  // contribution of the outer half of the range
  for (int k = -working_range; k <= working_range; ++k) {
    const double value = std::abs(spec.raw_profile(k));
    if (value > 1.0 + 1e-12 && report.bounded_ok) {
      report.bounded_ok = false;
      report.failures.push_back("|Lambda(" + std::to_string(k) + ")| > 1");
    }
    const double term = std::pow(std::abs(static_cast<double>(k)), b) * value;
    report.moment_sum += term;
    if (std::abs(k) > working_range / 2) tail += term;
  }

  report.moment_finite = std::visit(
      [&](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PaperSimKernel>) {
          return std::isfinite(k.hard_cutoff) || k.decay_exponent > b + 1.0;
        } else if constexpr (std::is_same_v<T, SpectralCutoffKernel>) {
          return true;
        } else {
          // Numeric proxy: the outer half of the range carries < 1% of the sum.
          return std::isfinite(report.moment_sum) && tail <= 1e-2 * std::max(report.moment_sum, 1e-300);
        }
      },
      spec.kind());
  if (!report.moment_finite) report.failures.push_back("sum |k|^b |Lambda(k)| does not converge");

  if (const auto* sim = std::get_if<PaperSimKernel>(&spec.kind())) {
    // Decay (|u|/M)^-p admits smoothness (p-1)/2 < s < (p+1)/2.
    report.smoothness_window = std::make_pair((sim->decay_exponent - 1.0) / 2.0,
                                              (sim->decay_exponent + 1.0) / 2.0);
  }
  if (profile && report.smoothness_window) {
    const auto [lo, hi] = *report.smoothness_window;
    report.profile_in_window = profile->smoothness_s > lo && profile->smoothness_s < hi;
    if (!*report.profile_in_window) {
      report.failures.push_back("smoothness s = " + std::to_string(profile->smoothness_s) +
                                " outside the kernel's admissible window");
    }
  }
  return report;
}

}  // namespace deconv
