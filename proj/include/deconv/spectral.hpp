#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace deconv {

using Complex = std::complex<double>;

/// Placement of the 2n+1 equispaced design points in [-1/2, 1/2].
enum class GridKind {
  kSimulation,  ///< x_j = j / (2n+1); admits an FFT for the empirical coefficients.
  kModel,       ///< x_j = j / (2n); endpoints at +-1/2.
};

class DesignGrid {
 public:
  DesignGrid(int n, GridKind kind);

  int n() const { return n_; }
  GridKind kind() const { return kind_; }
  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

  /// Recognizes `x` as one of the two supported grids (to 1e-9), else throws
  /// ValidationError.
  static DesignGrid detect(std::span<const double> x);

  bool operator==(const DesignGrid& other) const { return n_ == other.n_ && kind_ == other.kind_; }

 private:
  int n_;
  GridKind kind_;
  std::vector<double> points_;
};

class Sample {
 public:
  Sample(DesignGrid grid, std::vector<double> responses);

  const DesignGrid& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  std::size_t size() const { return responses_.size(); }
  std::span<const double> responses() const { return responses_; }

 private:
  DesignGrid grid_;
  std::vector<double> responses_;
};

/// Complex Fourier coefficients indexed k = -K..K.
class SpectralCoefficients {
 public:
  SpectralCoefficients() = default;
  explicit SpectralCoefficients(int max_freq);
  SpectralCoefficients(int max_freq, std::vector<Complex> values);

  /// Builds a Hermitian set from the non-negative half k = 0..K.
  static SpectralCoefficients from_half(std::span<const Complex> half);

  int max_freq() const { return max_freq_; }
  std::size_t size() const { return values_.size(); }

  Complex operator[](int k) const { return values_[static_cast<std::size_t>(k + max_freq_)]; }
  Complex& operator[](int k) { return values_[static_cast<std::size_t>(k + max_freq_)]; }
  Complex at(int k) const;

  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  /// Coefficients k = 0..K, contiguous.
  std::span<const Complex> nonnegative() const {
    return std::span<const Complex>(values_).subspan(static_cast<std::size_t>(max_freq_));
  }

  /// Largest |value(-k) - conj(value(k))|.
  double hermitian_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermitian_defect() <= tol; }

 private:
  int max_freq_ = 0;
  std::vector<Complex> values_{Complex{}};
};

// Distortion --------------------------------------------------------------

struct LaplaceTruncated {
  double scale = 1.0;
};
struct UniformDensity {};
struct CustomDensity {
  std::function<double(double)> density;
  std::string name = "custom";
};

enum class CoefficientMode {
  kQuadrature,  ///< composite Gauss-Legendre on the truncated, normalized density
  kClosedForm,  ///< 1/(1 + 4 pi^2 scale^2 k^2); Laplace only
};

struct DistortionSpec {
  std::variant<LaplaceTruncated, UniformDensity, CustomDensity> kind = LaplaceTruncated{};
  CoefficientMode mode = CoefficientMode::kQuadrature;
  double ill_posedness_b = 2.0;
  double gamma_threshold = 1.0;
  double c_psi_lower = 0.0;
  double c_psi_upper = 0.0;

  static DistortionSpec laplace(double scale, CoefficientMode mode = CoefficientMode::kQuadrature);
  static DistortionSpec uniform();

  /// Density on [-1/2, 1/2] (normalized; zero outside).
  double density(double x) const;
};

/// Positivity on a 2001-point grid and unit mass within 1e-10. Throws
/// ValidationError on failure.
void validate_density(const DistortionSpec& spec);

struct DistortionAssumptionReport {
  bool holds = true;
  int first_violation = 0;  ///< 0 when none
  double min_scaled = 0.0;  ///< min over Gamma < |k| <= K of |k|^b |Psi(k)|
  double max_scaled = 0.0;
};

/// Checks C_lower < |k|^b |Psi(k)| < C_upper for Gamma < |k| <= psi.max_freq().
DistortionAssumptionReport validate_distortion_assumption(const DistortionSpec& spec,
                                                          const SpectralCoefficients& psi);

/// Psi(k) = int psi(u) exp(-i 2 pi k u) du over [-1/2, 1/2], k = -K..K.
SpectralCoefficients distortion_coefficients(const DistortionSpec& spec, int max_freq);

/// A distortion together with its coefficients, checked invertible up to max_freq.
class DistortionOperator {
 public:
  DistortionOperator(DistortionSpec spec, int max_freq);
  DistortionOperator(DistortionSpec spec, SpectralCoefficients psi);

  /// Psi = 1 for |k| <= max_freq (no blurring); b = 1 for kernel validation.
  static DistortionOperator identity(int max_freq);

  const DistortionSpec& spec() const { return spec_; }
  const SpectralCoefficients& psi() const { return psi_; }
  int max_freq() const { return psi_.max_freq(); }

 private:
  DistortionSpec spec_;
  SpectralCoefficients psi_;
};

/// Throws NonInvertibleDistortionError when any |Psi(k)| < 1e-14 for |k| <= upto.
void require_invertible(const SpectralCoefficients& psi, int upto);

// Operations ---------------------------------------------------------------

/// R(k) = (2n+1)^-1 sum_j Y_j exp(-i 2 pi k x_j), |k| <= max_freq <= n. FFT on
/// the simulation grid, direct summation otherwise.
SpectralCoefficients empirical_fourier_coefficients(const Sample& sample, int max_freq);

/// Non-negative half k = 0..n of the empirical coefficients of `responses` on
/// the simulation grid of half-count n. Hot path used by the bootstrap.
void empirical_half_spectrum(std::span<const double> responses, std::span<Complex> out);

/// Direct-summation form, any grid. Reference for the FFT path.
SpectralCoefficients empirical_fourier_coefficients_direct(const Sample& sample, int max_freq);

SpectralCoefficients apply_convolution(const SpectralCoefficients& theta,
                                       const SpectralCoefficients& psi);

/// sum_k c(k) exp(i 2 pi k x); throws SymmetryViolationError when the
/// imaginary residue exceeds 1e-8.
double evaluate_series(const SpectralCoefficients& coeffs, double x);
std::vector<double> evaluate_series(const SpectralCoefficients& coeffs, std::span<const double> xs);

/// sum_k |a(k) - b(k)|^2, the squared L2 distance of the two series on [-1/2, 1/2].
double parseval_l2_distance(const SpectralCoefficients& a, const SpectralCoefficients& b);

}  // namespace deconv
