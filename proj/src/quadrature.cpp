#include "deconv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "deconv/error.hpp"

namespace deconv {
namespace {

struct Simpson {
  const std::function<double(double)>& f;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) {
      throw IntegrationError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    }
    // Below this the rounding in left+right dominates the Richardson estimate.
    const double child_tol = std::max(0.5 * tol, 1e-17);
    return recurse(a, m, fa, flm, fm, left, child_tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, child_tol, depth - 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
  // Seed with a fixed 8-panel split so narrow features cannot hide between
  // the first three nodes.
  constexpr int kPanels = 8;
  const double width = (b - a) / kPanels;
  const Simpson s{f};
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == kPanels) ? b : lo + width;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += s.recurse(lo, hi, flo, fm, fhi, whole, tol / kPanels, max_depth);
  }
  return total;
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw DomainError("composite_gauss needs at least one panel");
  if (a == b) return 0.0;
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == panels) ? b : lo + width;
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, hi);
  }
  return total;
}

int oscillatory_panels(int k, double width) {
  return 2 + static_cast<int>(std::ceil(std::abs(k) * std::abs(width)));
}

}  // namespace deconv
