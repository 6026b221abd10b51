#include "deconv/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "deconv/error.hpp"
#include "deconv/parallel.hpp"
#include "deconv/quadrature.hpp"
#include "deconv/rng.hpp"
#include "deconv/simd/kernels.hpp"

namespace deconv {

void BootstrapConfig::validate() const {
  if (replications < 1) throw DomainError("bootstrap replications must be >= 1");
  if (scaling_c_n && !(*scaling_c_n > 0.0)) throw DomainError("explicit c_n must be positive");
  if (const auto* custom = std::get_if<CustomContaminant>(&contaminant)) {
    if (!custom->density || !custom->cdf || !custom->sampler) {
      throw DomainError("custom contaminant needs density, cdf and sampler");
    }
  }
}

// Smooth law -------------------------------------------------------------------

SmoothErrorDistribution::SmoothErrorDistribution(std::vector<double> centered_residuals, double c_n,
                                                 Contaminant contaminant)
    : centered_(std::move(centered_residuals)), c_n_(c_n), contaminant_(std::move(contaminant)) {
  if (centered_.empty()) throw DomainError("smooth bootstrap needs residuals");
  if (!(c_n_ > 0.0)) {
    throw DegenerateDistributionError("smooth bootstrap scaling c_n must be positive (got " +
                                      std::to_string(c_n_) + ")");
  }
  double mean = 0.0;
  double scale = 1.0;
  for (double e : centered_) {
    mean += e;
    scale = std::max(scale, std::abs(e));
  }
  mean /= static_cast<double>(centered_.size());
  if (std::abs(mean) > 1e-12 * scale) throw DomainError("residuals passed to the smooth law are not centered");
}

double SmoothErrorDistribution::contaminant_cdf(double z) const {
  if (const auto* custom = std::get_if<CustomContaminant>(&contaminant_)) return custom->cdf(z);
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double SmoothErrorDistribution::contaminant_density(double z) const {
  if (const auto* custom = std::get_if<CustomContaminant>(&contaminant_)) return custom->density(z);
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double SmoothErrorDistribution::cdf(double t) const {
  double acc = 0.0;
  for (double e : centered_) acc += contaminant_cdf((t - e) / c_n_);
  return acc / static_cast<double>(centered_.size());
}

double SmoothErrorDistribution::density(double t) const {
  double acc = 0.0;
  for (double e : centered_) acc += contaminant_density((t - e) / c_n_);
  return acc / (static_cast<double>(centered_.size()) * c_n_);
}

double SmoothErrorDistribution::partial_mean(double t) const {
  double acc = 0.0;
  if (std::holds_alternative<StandardNormalContaminant>(contaminant_)) {
    // E[(e + c U) 1(U <= z)] = e Phi(z) - c phi(z), z = (t - e)/c.
    for (double e : centered_) {
      const double z = (t - e) / c_n_;
      acc += e * contaminant_cdf(z) - c_n_ * contaminant_density(z);
    }
  } else {
    // int_{-inf}^t x f*(x) dx = t F*(t) - int_{-inf}^t F*(x) dx; the second
    // term is evaluated per component by integrating the contaminant CDF.
    const auto& custom = std::get<CustomContaminant>(contaminant_);
    for (double e : centered_) {
      const double z = (t - e) / c_n_;
      double lower = std::min(z, -1.0);
      while (custom.cdf(lower) > 1e-14) lower *= 2.0;
      const double integral = adaptive_simpson(custom.cdf, lower, z, 1e-10);
      acc += t * custom.cdf(z) - c_n_ * integral;
    }
  }
  return acc / static_cast<double>(centered_.size());
}

double SmoothErrorDistribution::variance() const {
  double ss = 0.0;
  for (double e : centered_) ss += e * e;
  const double u_var = std::holds_alternative<CustomContaminant>(contaminant_)
                           ? std::get<CustomContaminant>(contaminant_).variance
                           : 1.0;
  return ss / static_cast<double>(centered_.size()) + c_n_ * c_n_ * u_var;
}

void SmoothErrorDistribution::sample(std::span<double> out, std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, centered_.size() - 1);
  if (const auto* custom = std::get_if<CustomContaminant>(&contaminant_)) {
    for (double& v : out) {
      const double base = centered_[pick(rng)];
      v = base + c_n_ * custom->sampler(rng);
    }
    return;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) {
    const double base = centered_[pick(rng)];
    v = base + c_n_ * normal(rng);
  }
}

std::vector<double> SmoothErrorDistribution::sample(std::size_t count, std::mt19937_64& rng) const {
  std::vector<double> out(count);
  sample(out, rng);
  return out;
}

std::vector<double> sample_smooth_errors(const SmoothErrorDistribution& dist, std::size_t count,
                                         std::mt19937_64& rng) {
  return dist.sample(count, rng);
}
double smooth_cdf(const SmoothErrorDistribution& dist, double t) { return dist.cdf(t); }
double smooth_density(const SmoothErrorDistribution& dist, double t) { return dist.density(t); }

// Grid, residual helpers ---------------------------------------------------------------

SelectionGrid SelectionGrid::standard(int n, int count) {
  const double size = 2.0 * n + 1.0;
  return SelectionGrid{std::pow(size, -0.1),
                       10.0 * std::pow(size, -1.0 / 12.0) * std::pow(std::log(size), 1.0 / 12.0), count};
}

void SelectionGrid::validate() const {
  if (!(lower > 0.0 && lower < upper)) throw DomainError("selection grid needs 0 < lower < upper");
  if (count < 1) throw DomainError("selection grid needs at least one point");
}

std::vector<double> SelectionGrid::points() const {
  validate();
  if (count == 1) return {lower};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (upper - lower) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lower + i * step;
  out.back() = upper;
  return out;
}

std::vector<double> center_residuals(std::span<const double> residuals) {
  if (residuals.empty()) throw DomainError("cannot center an empty residual set");
  const double mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / residuals.size();
  std::vector<double> out(residuals.begin(), residuals.end());
  for (double& e : out) e -= mean;
  return out;
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("a sample variance needs at least two values");
  const double size = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / size;
  double ss = 0.0;
  for (double e : values) ss += (e - mean) * (e - mean);
  return ss / (size - 1.0);
}

double silverman_cn(std::span<const double> centered) {
  if (centered.size() < 2) throw DomainError("Silverman's rule needs at least two residuals");
  return 1.06 * std::sqrt(sample_variance(centered)) * std::pow(static_cast<double>(centered.size()), -0.2);
}

std::size_t argmin_first(std::span<const double> values) {
  if (values.empty()) throw DomainError("argmin of an empty curve");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

// Selector -------------------------------------------------------------------------------

SmoothErrorDistribution smooth_error_distribution(const Sample& sample, const RegularizedEstimate& pilot,
                                                  const BootstrapConfig& config) {
  auto centered = center_residuals(residuals(sample, pilot));
  const double c_n = config.scaling_c_n ? *config.scaling_c_n : silverman_cn(centered);
  return SmoothErrorDistribution(std::move(centered), c_n, config.contaminant);
}

SelectionResult select_g_opt(const Sample& sample, const RegularizedEstimate& pilot,
                             std::span<const double> candidates, const SmoothingKernelSpec& kernel,
                             const DistortionOperator& distortion, const BootstrapConfig& config) {
  config.validate();
  if (candidates.empty()) throw DomainError("no candidate regularization parameters");
  for (double g : candidates) {
    if (!(g > 0.0)) throw DomainError("candidate regularization parameters must be positive");
  }
  const int n = sample.n();
  if (pilot.max_freq() != n) throw ShapeError("pilot range does not match the sample");
  require_invertible(distortion.psi(), n);

  const std::vector<double> fitted = fitted_values(pilot, sample);
  const SmoothErrorDistribution law = smooth_error_distribution(sample, pilot, config);

  const std::size_t half = static_cast<std::size_t>(n) + 1;
  const std::size_t n_cand = candidates.size();
  std::vector<Complex> target(pilot.coefficients.nonnegative().begin(), pilot.coefficients.nonnegative().end());
  std::vector<Complex> inv_psi(half);
  for (int k = 0; k <= n; ++k) inv_psi[static_cast<std::size_t>(k)] = 1.0 / distortion.psi()[k];
  std::vector<std::vector<double>> weights(n_cand);
  for (std::size_t c = 0; c < n_cand; ++c) weights[c] = kernel_weights(kernel, candidates[c], n);

  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::vector<double> distances(reps * n_cand);
  const bool fast_grid = sample.grid().kind() == GridKind::kSimulation;

  parallel_for(reps, config.threads, [&](std::size_t b) {
    std::vector<double> errors(sample.size());
    std::vector<double> boot_y(sample.size());
    std::vector<Complex> spectrum(half);
    auto draw_spectrum = [&](std::mt19937_64& rng) {
      law.sample(errors, rng);
      simd::axpy(fitted, 1.0, errors, boot_y);
      if (fast_grid) {
        empirical_half_spectrum(boot_y, spectrum);
      } else {
        const auto full = empirical_fourier_coefficients(Sample(sample.grid(), boot_y), n);
        std::copy(full.nonnegative().begin(), full.nonnegative().end(), spectrum.begin());
      }
      for (std::size_t k = 0; k < half; ++k) spectrum[k] *= inv_psi[k];
    };
    auto distance = [&](std::size_t c) {
      // Full-range distance from the half spectrum: k = 0 once, k > 0 twice.
      const double all = simd::scaled_sq_distance(weights[c], spectrum, target);
      const double d0 = std::norm(weights[c][0] * spectrum[0] - target[0]);
      return 2.0 * all - d0;
    };
    if (config.common_random_numbers) {
      auto rng = make_stream(config.rng_seed, {kTagBootstrap, b});
      draw_spectrum(rng);
      for (std::size_t c = 0; c < n_cand; ++c) distances[b * n_cand + c] = distance(c);
    } else {
      for (std::size_t c = 0; c < n_cand; ++c) {
        auto rng = make_stream(config.rng_seed, {kTagBootstrap, b, c + 1});
        draw_spectrum(rng);
        distances[b * n_cand + c] = distance(c);
      }
    }
  });

  SelectionResult result;
  result.candidates.assign(candidates.begin(), candidates.end());
  result.objective_curve.assign(n_cand, 0.0);
  result.standard_errors.assign(n_cand, 0.0);
  for (std::size_t c = 0; c < n_cand; ++c) {
    double sum = 0.0;
    for (std::size_t b = 0; b < reps; ++b) sum += distances[b * n_cand + c];
    const double mean = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (std::size_t b = 0; b < reps; ++b) ss += (distances[b * n_cand + c] - mean) * (distances[b * n_cand + c] - mean);
    result.objective_curve[c] = mean;
    result.standard_errors[c] = reps > 1 ? std::sqrt(ss / (reps - 1.0) / reps) : 0.0;
  }
  result.index = argmin_first(result.objective_curve);
  result.g_opt = result.candidates[result.index];
  result.c_n = law.c_n();
  return result;
}

SelectionResult select_g_opt(const Sample& sample, const RegularizedEstimate& pilot, const SelectionGrid& grid,
                             const SmoothingKernelSpec& kernel, const DistortionOperator& distortion,
                             const BootstrapConfig& config) {
  const auto points = grid.points();
  return select_g_opt(sample, pilot, std::span<const double>(points), kernel, distortion, config);
}

double bootstrap_imse(const Sample& sample, const RegularizedEstimate& pilot, double g,
                      const SmoothingKernelSpec& kernel, const DistortionOperator& distortion,
                      const BootstrapConfig& config) {
  const double candidate[] = {g};
  return select_g_opt(sample, pilot, std::span<const double>(candidate), kernel, distortion, config)
      .objective_curve.front();
}

}  // namespace deconv
