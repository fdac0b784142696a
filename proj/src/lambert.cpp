#include "wcc/lambert.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wcc {

namespace {

const double kBranchPoint = -std::exp(-1.0);  // -1/e
constexpr double kDomainSlack = 1e-15;

// Starting point accurate enough for Halley to converge in a few steps.
double initial_guess(double x) {
  if (x < -0.3235) {
    // Series around the branch point in p = sqrt(2 (1 + e x)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + M_E * x)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  }
  if (x < 1.0) {
    // Taylor series around 0.
    return x * (1.0 + x * (-1.0 + x * (1.5 - x * 8.0 / 3.0)));
  }
  if (x < 3.0) {
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) return x;
  if (x < kBranchPoint) {
    if (x < kBranchPoint - kDomainSlack)
      throw std::domain_error("lambert_w0: argument below -1/e");
    return -1.0;
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  double w = initial_guess(x);
  const double tol = 1e-14 * std::max(1.0, std::abs(x));
  for (int iter = 0; iter < 40; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= tol) break;
    const double fp = ew * (w + 1.0);
    const double fpp = ew * (w + 2.0);
    const double denom = fp - 0.5 * f * fpp / fp;
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double next = w - f / denom;
    if (next == w) break;
    w = next;
  }
  return std::max(w, -1.0);
}

double lambert_w0_ln(double ln_x) {
  if (!(ln_x > 1.0))
    throw std::domain_error("lambert_w0_ln: requires ln_x > 1");
  if (std::isinf(ln_x)) return ln_x;
  // Newton on g(w) = w + ln w - ln_x, monotone for w > 0.
  double w = ln_x > M_E ? ln_x - std::log(ln_x) : 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double g = w + std::log(w) - ln_x;
    const double step = g / (1.0 + 1.0 / w);
    const double next = w - step;
    if (next == w || std::abs(step) <= 1e-16 * w) return next;
    w = next;
  }
  return w;
}

}  // namespace wcc
