#pragma once

namespace fvslv {

/// Modified Bessel function of the first kind I_q(z) for q > -1, z >= 0.
/// Overflows to +inf where I_q(z) exceeds the double range; use log_bessel_i there.
double bessel_i(double q, double z);

/// log I_q(z). Returns -inf for z = 0, q > 0 and +inf for z = 0, q < 0.
double log_bessel_i(double q, double z);

}  // namespace fvslv
