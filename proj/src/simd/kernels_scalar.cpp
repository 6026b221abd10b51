#include "deconv/simd/kernels.hpp"


namespace deconv::simd {
namespace {

double sq_distance_scalar(const Complex* a, const Complex* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double re = a[k].real() - b[k].real();
    const double im = a[k].imag() - b[k].imag();
    acc += re * re + im * im;
  }
  return acc;
}

double scaled_sq_distance_scalar(const double* w, const Complex* v, const Complex* t, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double re = w[k] * v[k].real() - t[k].real();
    const double im = w[k] * v[k].imag() - t[k].imag();
    acc += re * re + im * im;
  }
  return acc;
}

double weighted_energy_scalar(const double* w, const Complex* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += w[k] * (v[k].real() * v[k].real() + v[k].imag() * v[k].imag());
  }
  return acc;
}

void axpy_scalar(const double* a, double c, const double* b, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + c * b[k];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, sq_distance_scalar, scaled_sq_distance_scalar,
                                 weighted_energy_scalar, axpy_scalar};
  return table;
}

}  // namespace deconv::simd
