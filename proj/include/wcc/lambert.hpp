#pragma once

namespace wcc {

/// Principal branch of the Lambert W function: the w >= -1 solving
/// w e^w = x, defined for x >= -1/e. The residual |w e^w - x| stays below
/// 1e-12 * max(1, |x|). Inputs below -1/e by more than 1e-15 raise
/// std::domain_error; inputs within that slack clamp to the branch point.
double lambert_w0(double x);

/// W0 of an argument given by its natural logarithm, for magnitudes that
/// would overflow a double. Requires ln_x > 1 (so W0 > 1); solves
/// w + ln w = ln_x.
double lambert_w0_ln(double ln_x);

}  // namespace wcc
