#include "deconv/riskhull.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deconv/error.hpp"
#include "deconv/rng.hpp"

namespace deconv {

void RiskHullConfig::validate(int n) const {
  if (!(alpha >= 0.0)) throw DomainError("risk hull alpha must be non-negative");
  if (max_cutoff && (*max_cutoff < 0 || *max_cutoff > n)) {
    throw FrequencyOverflowError("risk hull max_cutoff must lie in [0, n]");
  }
  if (const auto* mc = std::get_if<MonteCarloPenalty>(&penalty); mc && mc->draws < 2) {
    throw DomainError("Monte-Carlo penalty needs at least two draws");
  }
}

namespace {

std::vector<double> monte_carlo_penalty(const std::vector<double>& noise, int max_cutoff, int draws,
                                        std::size_t sample_size, std::uint64_t seed) {
  // noise[k + M] = s_k^2 for k = -M..M
  const std::size_t cols = static_cast<std::size_t>(max_cutoff) + 1;
  std::vector<double> sums(static_cast<std::size_t>(draws) * cols);
  auto rng = make_stream(seed, {kTagRiskHull, sample_size});
  std::normal_distribution<double> normal;
  for (int d = 0; d < draws; ++d) {
    double* row = sums.data() + static_cast<std::size_t>(d) * cols;
    const double z0 = normal(rng);
    double acc = noise[static_cast<std::size_t>(max_cutoff)] * (z0 * z0 - 1.0);
    row[0] = acc;
    for (int m = 1; m <= max_cutoff; ++m) {
      const double zp = normal(rng);
      const double zm = normal(rng);
      acc += noise[static_cast<std::size_t>(max_cutoff + m)] * (zp * zp - 1.0) +
             noise[static_cast<std::size_t>(max_cutoff - m)] * (zm * zm - 1.0);
      row[m] = acc;
    }
  }
  const double level = 1.0 - 1.0 / static_cast<double>(sample_size);
  const auto rank = static_cast<std::size_t>(
      std::clamp(std::ceil(level * draws) - 1.0, 0.0, static_cast<double>(draws - 1)));
  std::vector<double> pen(cols);
  std::vector<double> column(static_cast<std::size_t>(draws));
  for (std::size_t m = 0; m < cols; ++m) {
    for (int d = 0; d < draws; ++d) column[static_cast<std::size_t>(d)] = sums[static_cast<std::size_t>(d) * cols + m];
    std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(rank), column.end());
    pen[m] = column[rank];
  }
  // A hull must not shrink as frequencies are added.
  for (std::size_t m = 1; m < cols; ++m) pen[m] = std::max(pen[m], pen[m - 1]);
  return pen;
}

// Frequencies with |k| = m.
std::vector<int> shell(int m) { return m == 0 ? std::vector<int>{0} : std::vector<int>{m, -m}; }

std::vector<double> approximate_penalty(const std::vector<double>& noise, int max_cutoff, double scale,
                                        std::size_t sample_size) {
  const double x = std::log(static_cast<double>(sample_size));
  std::vector<double> pen(static_cast<std::size_t>(max_cutoff) + 1);
  double sum4 = 0.0;
  double largest = 0.0;
  for (int m = 0; m <= max_cutoff; ++m) {
    for (int k : shell(m)) {
      const double s2 = noise[static_cast<std::size_t>(max_cutoff + k)];
      sum4 += s2 * s2;
      largest = std::max(largest, s2);
    }
    pen[static_cast<std::size_t>(m)] = scale * (2.0 * std::sqrt(x * sum4) + 2.0 * x * largest);
  }
  return pen;
}

}  // namespace

RiskHullSelection select_cutoff_risk_hull(const Sample& sample, const DistortionOperator& distortion,
                                          double sigma_sq_hat, const RiskHullConfig& config) {
  const int n = sample.n();
  config.validate(n);
  if (!(sigma_sq_hat >= 0.0)) throw DomainError("sigma^2 estimate must be non-negative");
  const int max_cutoff = config.max_cutoff.value_or(n);
  require_invertible(distortion.psi(), max_cutoff);

  const auto empirical = empirical_fourier_coefficients(sample, max_cutoff);
  const double size = static_cast<double>(sample.size());
  std::vector<double> noise(static_cast<std::size_t>(2 * max_cutoff + 1));
  std::vector<double> energy(noise.size());
  for (int k = -max_cutoff; k <= max_cutoff; ++k) {
    const double psi_sq = std::norm(distortion.psi()[k]);
    noise[static_cast<std::size_t>(k + max_cutoff)] = sigma_sq_hat / (size * psi_sq);
    energy[static_cast<std::size_t>(k + max_cutoff)] = std::norm(empirical[k]) / psi_sq;
  }

  RiskHullSelection out;
  if (sigma_sq_hat == 0.0 || std::holds_alternative<NoPenalty>(config.penalty)) {
    out.penalty.assign(static_cast<std::size_t>(max_cutoff) + 1, 0.0);
  } else if (const auto* mc = std::get_if<MonteCarloPenalty>(&config.penalty)) {
    out.penalty = monte_carlo_penalty(noise, max_cutoff, mc->draws, sample.size(), config.rng_seed);
  } else {
    out.penalty = approximate_penalty(noise, max_cutoff, std::get<ApproximateScaledPenalty>(config.penalty).scale,
                                      sample.size());
  }

  out.criterion.resize(static_cast<std::size_t>(max_cutoff) + 1);
  double signal = 0.0;
  double variance = 0.0;
  for (int m = 0; m <= max_cutoff; ++m) {
    for (int k : shell(m)) {
      signal += energy[static_cast<std::size_t>(k + max_cutoff)];
      variance += noise[static_cast<std::size_t>(k + max_cutoff)];
    }
    out.criterion[static_cast<std::size_t>(m)] =
        -signal + 2.0 * variance + (1.0 + config.alpha) * out.penalty[static_cast<std::size_t>(m)];
  }
  out.cutoff = static_cast<int>(std::min_element(out.criterion.begin(), out.criterion.end()) - out.criterion.begin());
  return out;
}

double cutoff_regularization(int m) {
  if (m < 0) throw DomainError("cut-off must be non-negative");
  return 1.0 / (m + 0.5);
}

RegularizedEstimate spectral_cutoff_estimate(const Sample& sample, const DistortionOperator& distortion, int m) {
  if (m > sample.n()) {
    throw FrequencyOverflowError("cut-off " + std::to_string(m) + " exceeds n = " + std::to_string(sample.n()));
  }
  return estimate_theta(sample, distortion, SmoothingKernelSpec::spectral_cutoff(1.0), cutoff_regularization(m));
}

}  // namespace deconv
