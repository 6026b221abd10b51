#pragma once

#include <variant>

#include "deconv/spectral.hpp"

namespace deconv {

/// 3 exp(-20 x^2)
struct Theta1 {};
/// 1 + 3 cos(3 pi x / 4) - 4 cos^2(3 pi x)
struct Theta2 {};
/// A band-limited signal given by its (Hermitian) coefficients.
struct CustomSignal {
  SpectralCoefficients coefficients;
};

struct SignalSpec {
  std::variant<Theta1, Theta2, CustomSignal> kind = Theta1{};

  std::string name() const;
};

/// Truth coefficients to |k| <= K plus the energy the truncation leaves out.
struct TruthCoefficients {
  SpectralCoefficients coefficients;
  double tail_energy = 0.0;   ///< int theta^2 - sum_{|k|<=K} |Theta(k)|^2, clamped at 0
  double total_energy = 0.0;  ///< int theta^2
};

double signal_eval(const SignalSpec& spec, double x);

/// Coefficients by quadrature (closed-form signals) or truncation
/// (custom signals).
TruthCoefficients truth_coefficients(const SignalSpec& spec, int k_truth);

}  // namespace deconv
