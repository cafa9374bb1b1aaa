#pragma once

namespace circmix {

//! Exponentially scaled modified Bessel function of the first kind,
//! e^{-x} I_nu(x), for integer order and x >= 0.
//!
//! Power series for x <= 15; above that the Hankel asymptotic expansion
//! when it reaches full precision, the series again while it cannot
//! overflow (x <= 700), and finally the scaled I_0 from the expansion times
//! a Miller backward-recurrence ratio.
double bessel_i_scaled(int nu, double x);

//! I_nu(x). Overflows to +inf for very large x; prefer the scaled form.
double bessel_i(int nu, double x);

//! I_nu(x) / I_0(x), stable for any x >= 0 and large orders.
double bessel_ratio(int nu, double x);

} // namespace circmix
