#include "ptcorr/expint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptcorr {

namespace {

const Complex I(0.0, 1.0);
constexpr double kEulerGamma = 0.57721566490153286;

// power series E1 = -gamma - log z + sum (-1)^{k+1} z^k / (k k!)
Complex e1_series(Complex z)
{
    Complex sum(0.0);
    Complex term(1.0);
    for (int k = 1; k <= 60; ++k) {
        term *= -z / double(k);
        const Complex add = -term / double(k);
        sum += add;
        if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return -kEulerGamma - std::log(z) + sum;
}

// modified Lentz continued fraction, e^{-z}/(z + 1/(1 + 1/(z + 2/(1 + ...))))
Complex e1_contfrac(Complex z)
{
    const double tiny = 1e-290;
    Complex b = z + 1.0;
    Complex c = 1.0 / tiny;
    Complex d = 1.0 / b;
    Complex h = d;
    for (int i = 1; i <= 400; ++i) {
        const double a = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        if (c == Complex(0.0)) c = tiny;
        const Complex delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z);
}

// asymptotic e^{-z}/z (1 - 1/z + 2/z^2 - ...), truncated at the smallest term
Complex e1_asymptotic(Complex z)
{
    Complex sum(1.0);
    Complex term(1.0);
    double smallest = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 40; ++k) {
        term *= -double(k) / z;
        const double mag = std::abs(term);
        if (mag > smallest) break;
        smallest = mag;
        sum += term;
        if (mag < 1e-18) break;
    }
    if (z.real() < -700.0) {
        // e^{-z} overflows; fall back on logs (not hit on our contours)
        return std::exp(-z - std::log(z)) * sum;
    }
    return std::exp(-z) / z * sum;
}

} // namespace

Complex expint_e1(Complex z)
{
    if (z == Complex(0.0))
        throw std::domain_error("expint_e1: z = 0");
    const double az = std::abs(z);
    if (az > 50.0) return e1_asymptotic(z);
    if (az < 4.0 || (z.real() > 0.0 && az < 12.0)) return e1_series(z);
    return e1_contfrac(z);
}

Complex fourier_pole_segment(Complex p, double q, double W)
{
    if (p.imag() == 0.0)
        throw std::invalid_argument("fourier_pole_segment: pole on the real axis");
    if (!(p.real() > 0.0) || !(p.real() < W))
        throw std::invalid_argument("fourier_pole_segment: need 0 < Re p < W");

    const Complex a = -p;      // u at w = 0
    const Complex b = W - p;   // u at w = W

    if (q == 0.0) {
        // path from a to b stays on one side of the real axis: principal logs
        return std::log(b) - std::log(a);
    }

    // int_a^b e^{-i q u}/u du = E1(i q a) - E1(i q b) - 2 pi i * m,
    // m = +-1 when the straight w = i q u path crosses the cut (-inf, 0].
    const Complex za = I * q * a;
    const Complex zb = I * q * b;
    Complex val = expint_e1(za) - expint_e1(zb);

    // the path is a vertical segment at Re w = -q * Im(a); it crosses the
    // negative real axis iff that is < 0 and Im w changes sign
    const double re_w = -q * a.imag();
    if (re_w < 0.0 && za.imag() * zb.imag() < 0.0) {
        // upward crossing (Im w increasing) continues below the principal
        // branch; downward crossing continues above
        const bool upward = zb.imag() > za.imag();
        val += upward ? Complex(0.0, -2.0 * M_PI) : Complex(0.0, 2.0 * M_PI);
    }

    return std::exp(-I * q * p) * val;
}

} // namespace ptcorr
