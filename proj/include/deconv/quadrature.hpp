#pragma once

#include <functional>

namespace deconv {

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance `tol`.
/// Throws IntegrationError when the recursion depth is exhausted before the
/// local error estimate meets its share of the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

/// Composite 20-point Gauss-Legendre rule on `panels` equal panels. Meant for
/// smooth oscillatory integrands; use at least one panel per two periods.
double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels);

/// Panel count for composite_gauss on an interval of length `width` carrying
/// the frequency e^{i 2 pi k x}.
int oscillatory_panels(int k, double width);

}  // namespace deconv
