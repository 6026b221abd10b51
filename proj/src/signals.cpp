#include "deconv/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deconv/error.hpp"
#include "deconv/quadrature.hpp"

namespace deconv {

using std::numbers::pi;

std::string SignalSpec::name() const {
  switch (kind.index()) {
    case 0:
      return "theta1";
    case 1:
      return "theta2";
    default:
      return "custom";
  }
}

double signal_eval(const SignalSpec& spec, double x) {
  return std::visit(
      [x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Theta1>) {
          return 3.0 * std::exp(-20.0 * x * x);
        } else if constexpr (std::is_same_v<T, Theta2>) {
          const double c = std::cos(3.0 * pi * x);
          return 1.0 + 3.0 * std::cos(3.0 * pi * x / 4.0) - 4.0 * c * c;
        } else {
          return evaluate_series(s.coefficients, x);
        }
      },
      spec.kind);
}

TruthCoefficients truth_coefficients(const SignalSpec& spec, int k_truth) {
  if (k_truth < 0) throw DomainError("k_truth must be non-negative");
  TruthCoefficients out;
  if (const auto* custom = std::get_if<CustomSignal>(&spec.kind)) {
    const auto& c = custom->coefficients;
    out.coefficients = SpectralCoefficients(k_truth);
    for (int k = -std::min(k_truth, c.max_freq()); k <= std::min(k_truth, c.max_freq()); ++k) {
      out.coefficients[k] = c[k];
    }
    for (const auto& v : c.values()) out.total_energy += std::norm(v);
    double kept = 0.0;
    for (const auto& v : out.coefficients.values()) kept += std::norm(v);
    out.tail_energy = std::max(0.0, out.total_energy - kept);
    return out;
  }

  // Both built-in signals are even, so the coefficients are real cosine integrals.
  const auto f = [&](double x) { return signal_eval(spec, x); };
  out.coefficients = SpectralCoefficients(k_truth);
  for (int k = 0; k <= k_truth; ++k) {
    const double w = 2.0 * pi * k;
    const double c =
        composite_gauss([&](double x) { return f(x) * std::cos(w * x); }, -0.5, 0.5, oscillatory_panels(k, 1.0));
    out.coefficients[k] = c;
    out.coefficients[-k] = c;
  }
  out.total_energy = adaptive_simpson([&](double x) { return f(x) * f(x); }, -0.5, 0.5, 1e-13);
  double kept = 0.0;
  for (const auto& v : out.coefficients.values()) kept += std::norm(v);
  out.tail_energy = std::max(0.0, out.total_energy - kept);
  return out;
}

}  // namespace deconv
