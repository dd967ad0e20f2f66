#ifndef PTCORR_EXPINT_HPP
#define PTCORR_EXPINT_HPP

#include <complex>

namespace ptcorr {

using Complex = std::complex<double>;

// Principal-branch exponential integral E1(z), z off the negative real axis.
Complex expint_e1(Complex z);

// Closed form of the truncated Fourier-pole integral
//   int_0^W e^{-i q w} / (w - p) dw,   Im p != 0,  0 < Re p < W,
// via E1 differences with explicit branch-crossing bookkeeping.
Complex fourier_pole_segment(Complex p, double q, double W);

} // namespace ptcorr

#endif
