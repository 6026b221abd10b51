#include "deconv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "deconv/error.hpp"
#include "deconv/quadrature.hpp"
#include "deconv/simd/kernels.hpp"

namespace deconv {

using std::numbers::pi;

// DesignGrid / Sample --------------------------------------------------------

DesignGrid::DesignGrid(int n, GridKind kind) : n_(n), kind_(kind) {
  if (n < 1) throw DomainError("design grid half-count must be positive");
  const double denom = kind == GridKind::kSimulation ? 2.0 * n + 1.0 : 2.0 * n;
  points_.reserve(static_cast<std::size_t>(2 * n + 1));
  for (int j = -n; j <= n; ++j) points_.push_back(j / denom);
}

DesignGrid DesignGrid::detect(std::span<const double> x) {
  if (x.size() < 3 || x.size() % 2 == 0) {
    throw ValidationError("design must have an odd number (>= 3) of points, got " +
                          std::to_string(x.size()));
  }
  const int n = static_cast<int>(x.size() / 2);
  for (GridKind kind : {GridKind::kSimulation, GridKind::kModel}) {
    DesignGrid grid(n, kind);
    bool match = true;
    for (std::size_t i = 0; i < x.size() && match; ++i) match = std::abs(x[i] - grid[i]) <= 1e-9;
    if (match) return grid;
  }
  throw ValidationError("design points are neither j/(2n+1) nor j/(2n) for j = -n..n");
}

Sample::Sample(DesignGrid grid, std::vector<double> responses)
    : grid_(std::move(grid)), responses_(std::move(responses)) {
  if (responses_.size() != grid_.size()) {
    throw ShapeError("response count " + std::to_string(responses_.size()) +
                     " does not match design size " + std::to_string(grid_.size()));
  }
  for (double y : responses_) {
    if (!std::isfinite(y)) throw ValidationError("responses must be finite");
  }
}

// SpectralCoefficients -------------------------------------------------------

SpectralCoefficients::SpectralCoefficients(int max_freq)
    : max_freq_(max_freq), values_(static_cast<std::size_t>(2 * max_freq + 1)) {
  if (max_freq < 0) throw DomainError("max_freq must be non-negative");
}

SpectralCoefficients::SpectralCoefficients(int max_freq, std::vector<Complex> values)
    : max_freq_(max_freq), values_(std::move(values)) {
  if (max_freq < 0 || values_.size() != static_cast<std::size_t>(2 * max_freq + 1)) {
    throw ShapeError("coefficient vector length must be 2K+1");
  }
}

SpectralCoefficients SpectralCoefficients::from_half(std::span<const Complex> half) {
  if (half.empty()) throw ShapeError("half spectrum must contain k = 0");
  const int k_max = static_cast<int>(half.size()) - 1;
  SpectralCoefficients out(k_max);
  out[0] = half[0];
  for (int k = 1; k <= k_max; ++k) {
    out[k] = half[static_cast<std::size_t>(k)];
    out[-k] = std::conj(half[static_cast<std::size_t>(k)]);
  }
  return out;
}

Complex SpectralCoefficients::at(int k) const {
  if (k < -max_freq_ || k > max_freq_) {
    throw FrequencyOverflowError("frequency " + std::to_string(k) + " outside +-" +
                                 std::to_string(max_freq_));
  }
  return (*this)[k];
}

double SpectralCoefficients::hermitian_defect() const {
  double worst = 0.0;
  for (int k = 0; k <= max_freq_; ++k) {
    worst = std::max(worst, std::abs((*this)[-k] - std::conj((*this)[k])));
  }
  return worst;
}

// Distortion -------------------------------------------------------------------

DistortionSpec DistortionSpec::laplace(double scale, CoefficientMode mode) {
  if (!(scale > 0.0)) throw DomainError("Laplace scale must be positive");
  DistortionSpec spec;
  spec.kind = LaplaceTruncated{scale};
  spec.mode = mode;
  spec.ill_posedness_b = 2.0;
  spec.gamma_threshold = 1.0;
  // Bounds for the closed form 1/(1 + 4 pi^2 s^2 k^2) with |k| >= 2.
  const double a = 4.0 * pi * pi * scale * scale;
  spec.c_psi_lower = 1.0 / (1.0 + a);
  spec.c_psi_upper = 1.0 / a;
  return spec;
}

DistortionSpec DistortionSpec::uniform() {
  DistortionSpec spec;
  spec.kind = UniformDensity{};
  spec.ill_posedness_b = 0.0;
  spec.gamma_threshold = 0.0;
  return spec;
}

double DistortionSpec::density(double x) const {
  if (x < -0.5 || x > 0.5) return 0.0;
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LaplaceTruncated>) {
          const double mass = 1.0 - std::exp(-0.5 / k.scale);
          return std::exp(-std::abs(x) / k.scale) / (2.0 * k.scale * mass);
        } else if constexpr (std::is_same_v<T, UniformDensity>) {
          return 1.0;
        } else {
          return k.density(x);
        }
      },
      kind);
}

namespace {

// Integrate on [-1/2, 0] and [0, 1/2] separately so the Laplace cusp is a node.
double integrate_halves(const std::function<double(double)>& f, double tol) {
  return adaptive_simpson(f, -0.5, 0.0, 0.5 * tol) + adaptive_simpson(f, 0.0, 0.5, 0.5 * tol);
}

}  // namespace

void validate_density(const DistortionSpec& spec) {
  for (int i = 0; i <= 2000; ++i) {
    const double x = -0.5 + i / 2000.0;
    if (!(spec.density(x) > 0.0)) {
      throw ValidationError("distortion density must be positive on [-1/2, 1/2]; fails at x = " +
                            std::to_string(x));
    }
  }
  const double mass = integrate_halves([&](double x) { return spec.density(x); }, 1e-13);
  if (std::abs(mass - 1.0) > 1e-10) {
    throw ValidationError("distortion density integrates to " + std::to_string(mass) + ", not 1");
  }
}

DistortionAssumptionReport validate_distortion_assumption(const DistortionSpec& spec,
                                                          const SpectralCoefficients& psi) {
  DistortionAssumptionReport report;
  report.min_scaled = std::numeric_limits<double>::infinity();
  report.max_scaled = 0.0;
  const int k_start = static_cast<int>(std::floor(spec.gamma_threshold)) + 1;
  for (int k = std::max(k_start, 1); k <= psi.max_freq(); ++k) {
    for (int kk : {k, -k}) {
      const double scaled = std::pow(static_cast<double>(k), spec.ill_posedness_b) * std::abs(psi[kk]);
      report.min_scaled = std::min(report.min_scaled, scaled);
      report.max_scaled = std::max(report.max_scaled, scaled);
      if (report.holds && !(spec.c_psi_lower < scaled && scaled < spec.c_psi_upper)) {
        report.holds = false;
        report.first_violation = kk;
      }
    }
  }
  return report;
}

SpectralCoefficients distortion_coefficients(const DistortionSpec& spec, int max_freq) {
  if (max_freq < 0) throw DomainError("max_freq must be non-negative");
  SpectralCoefficients psi(max_freq);

  if (spec.mode == CoefficientMode::kClosedForm) {
    const auto* laplace = std::get_if<LaplaceTruncated>(&spec.kind);
    if (laplace == nullptr) {
      throw ValidationError("closed-form coefficients are only defined for the Laplace distortion");
    }
    const double a = 4.0 * pi * pi * laplace->scale * laplace->scale;
    for (int k = -max_freq; k <= max_freq; ++k) psi[k] = 1.0 / (1.0 + a * k * k);
    return psi;
  }

  if (std::holds_alternative<UniformDensity>(spec.kind)) {
    psi[0] = 1.0;
    return psi;
  }

  validate_density(spec);
  const bool symmetric = std::holds_alternative<LaplaceTruncated>(spec.kind);
  for (int k = 0; k <= max_freq; ++k) {
    const double w = 2.0 * pi * k;
    const int panels = oscillatory_panels(k, 0.5);
    const auto halves = [&](const std::function<double(double)>& g) {
      return composite_gauss(g, -0.5, 0.0, panels) + composite_gauss(g, 0.0, 0.5, panels);
    };
    const double re = halves([&](double u) { return spec.density(u) * std::cos(w * u); });
    const double im =
        (symmetric || k == 0) ? 0.0 : -halves([&](double u) { return spec.density(u) * std::sin(w * u); });
    psi[k] = Complex(re, im);
    psi[-k] = Complex(re, -im);
  }
  return psi;
}

void require_invertible(const SpectralCoefficients& psi, int upto) {
  if (upto > psi.max_freq()) {
    throw FrequencyOverflowError("distortion coefficients available to |k| <= " +
                                 std::to_string(psi.max_freq()) + ", need " + std::to_string(upto));
  }
  for (int k = -upto; k <= upto; ++k) {
    if (std::abs(psi[k]) < 1e-14) {
      throw NonInvertibleDistortionError("|Psi(" + std::to_string(k) + ")| < 1e-14");
    }
  }
}

DistortionOperator::DistortionOperator(DistortionSpec spec, int max_freq)
    : spec_(std::move(spec)), psi_(distortion_coefficients(spec_, max_freq)) {
  require_invertible(psi_, max_freq);
}

DistortionOperator::DistortionOperator(DistortionSpec spec, SpectralCoefficients psi)
    : spec_(std::move(spec)), psi_(std::move(psi)) {
  require_invertible(psi_, psi_.max_freq());
}

DistortionOperator DistortionOperator::identity(int max_freq) {
  DistortionSpec spec = DistortionSpec::uniform();
  spec.ill_posedness_b = 1.0;
  SpectralCoefficients ones(max_freq);
  for (auto& v : ones.values()) v = 1.0;
  return DistortionOperator(std::move(spec), std::move(ones));
}

// Empirical coefficients -------------------------------------------------------

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Plans are created under a lock (the FFTW planner is not reentrant) and then
// executed concurrently through the new-array interface, which is.
fftw_plan r2c_plan(int size) {
  static std::mutex mutex;
  static std::map<int, PlanPtr> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find(size);
  if (it != plans.end()) return it->second.get();
  std::vector<double> in(static_cast<std::size_t>(size));
  std::vector<fftw_complex> out(static_cast<std::size_t>(size / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(size, in.data(), out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw NumericalError("FFTW could not plan a transform of size " + std::to_string(size));
  plans.emplace(size, PlanPtr(plan));
  return plan;
}

}  // namespace

void empirical_half_spectrum(std::span<const double> responses, std::span<Complex> out) {
  const int size = static_cast<int>(responses.size());
  const int n = size / 2;
  if (size % 2 == 0 || out.size() != static_cast<std::size_t>(n + 1)) {
    throw ShapeError("half spectrum needs an odd-length input and n+1 outputs");
  }
  thread_local std::vector<double> scratch;
  scratch.assign(responses.begin(), responses.end());
  static_assert(sizeof(Complex) == sizeof(fftw_complex));
  fftw_execute_dft_r2c(r2c_plan(size), scratch.data(), reinterpret_cast<fftw_complex*>(out.data()));
  // x_j = j/N with j = m - n, so the m-indexed DFT picks up exp(i 2 pi k n / N).
  const double inv = 1.0 / size;
  for (int k = 0; k <= n; ++k) {
    const double phase = 2.0 * pi * static_cast<double>(k) * n / size;
    out[static_cast<std::size_t>(k)] *= std::polar(inv, phase);
  }
}

SpectralCoefficients empirical_fourier_coefficients_direct(const Sample& sample, int max_freq) {
  if (max_freq > sample.n()) {
    throw FrequencyOverflowError("max_freq " + std::to_string(max_freq) + " exceeds n = " +
                                 std::to_string(sample.n()));
  }
  if (max_freq < 0) throw DomainError("max_freq must be non-negative");
  SpectralCoefficients out(max_freq);
  const auto x = sample.grid().points();
  const auto y = sample.responses();
  const double inv = 1.0 / static_cast<double>(y.size());
  for (int k = 0; k <= max_freq; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < y.size(); ++j) acc += y[j] * std::polar(1.0, -2.0 * pi * k * x[j]);
    out[k] = acc * inv;
    out[-k] = std::conj(out[k]);
  }
  return out;
}

SpectralCoefficients empirical_fourier_coefficients(const Sample& sample, int max_freq) {
  if (max_freq > sample.n()) {
    throw FrequencyOverflowError("max_freq " + std::to_string(max_freq) + " exceeds n = " +
                                 std::to_string(sample.n()));
  }
  if (sample.grid().kind() != GridKind::kSimulation) {
    return empirical_fourier_coefficients_direct(sample, max_freq);
  }
  if (max_freq < 0) throw DomainError("max_freq must be non-negative");
  std::vector<Complex> half(static_cast<std::size_t>(sample.n() + 1));
  empirical_half_spectrum(sample.responses(), half);
  half.resize(static_cast<std::size_t>(max_freq + 1));
  return SpectralCoefficients::from_half(half);
}

// Series algebra ------------------------------------------------------------------

SpectralCoefficients apply_convolution(const SpectralCoefficients& theta,
                                       const SpectralCoefficients& psi) {
  if (theta.max_freq() != psi.max_freq()) {
    throw ShapeError("apply_convolution: max_freq " + std::to_string(theta.max_freq()) + " vs " +
                     std::to_string(psi.max_freq()));
  }
  SpectralCoefficients out(theta.max_freq());
  for (int k = -theta.max_freq(); k <= theta.max_freq(); ++k) out[k] = theta[k] * psi[k];
  return out;
}

double evaluate_series(const SpectralCoefficients& coeffs, double x) {
  Complex acc{};
  double scale = 1.0;
  for (int k = -coeffs.max_freq(); k <= coeffs.max_freq(); ++k) {
    acc += coeffs[k] * std::polar(1.0, 2.0 * pi * k * x);
    scale += std::abs(coeffs[k]);
  }
  if (std::abs(acc.imag()) > 1e-8 * scale) {
    throw SymmetryViolationError("series has imaginary residue " + std::to_string(acc.imag()) +
                                 " at x = " + std::to_string(x));
  }
  return acc.real();
}

std::vector<double> evaluate_series(const SpectralCoefficients& coeffs, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(evaluate_series(coeffs, x));
  return out;
}

double parseval_l2_distance(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  if (a.max_freq() != b.max_freq()) {
    throw ShapeError("parseval_l2_distance: max_freq " + std::to_string(a.max_freq()) + " vs " +
                     std::to_string(b.max_freq()));
  }
  return simd::sq_distance(a.values(), b.values());
}

}  // namespace deconv
