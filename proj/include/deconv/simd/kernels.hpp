#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels_scalar.cpp; wider variants must agree with it to rounding.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace deconv::simd {

using Complex = std::complex<double>;

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  /// sum_k |a_k - b_k|^2
  double (*sq_distance)(const Complex* a, const Complex* b, std::size_t n);
  /// sum_k |w_k v_k - t_k|^2, real weights
  double (*scaled_sq_distance)(const double* w, const Complex* v, const Complex* t, std::size_t n);
  /// sum_k w_k |v_k|^2
  double (*weighted_energy)(const double* w, const Complex* v, std::size_t n);
  /// out_k = a_k + c * b_k
  void (*axpy)(const double* a, double c, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Widest supported table; DECONV_SIMD=scalar in the environment forces the
/// reference path.
const KernelTable& active_kernels();

inline double sq_distance(std::span<const Complex> a, std::span<const Complex> b) {
  return active_kernels().sq_distance(a.data(), b.data(), a.size());
}
inline double scaled_sq_distance(std::span<const double> w, std::span<const Complex> v,
                                 std::span<const Complex> t) {
  return active_kernels().scaled_sq_distance(w.data(), v.data(), t.data(), w.size());
}
inline double weighted_energy(std::span<const double> w, std::span<const Complex> v) {
  return active_kernels().weighted_energy(w.data(), v.data(), w.size());
}
inline void axpy(std::span<const double> a, double c, std::span<const double> b, std::span<double> out) {
  active_kernels().axpy(a.data(), c, b.data(), out.data(), a.size());
}

}  // namespace deconv::simd
