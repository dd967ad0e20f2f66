#include "ptcorr/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptcorr {

namespace {
const Complex I(0.0, 1.0);
}

CubicSpline::CubicSpline(std::vector<double> x, const std::vector<Complex>& y)
    : xs_(std::move(x))
{
    const size_t n = xs_.size();
    if (n < 3 || y.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 3 matching nodes");
    for (size_t i = 0; i + 1 < n; ++i)
        if (!(xs_[i] < xs_[i + 1]))
            throw std::invalid_argument("CubicSpline: grid must increase");

    // natural spline: tridiagonal solve for second derivatives
    std::vector<Complex> m(n, Complex(0.0));
    std::vector<Complex> diag(n, Complex(1.0)), rhs(n, Complex(0.0));
    std::vector<Complex> sub(n, Complex(0.0)), sup(n, Complex(0.0));
    for (size_t i = 1; i + 1 < n; ++i) {
        const double hl = xs_[i] - xs_[i - 1];
        const double hr = xs_[i + 1] - xs_[i];
        sub[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        sup[i] = hr / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    for (size_t i = 1; i < n; ++i) {
        const Complex w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for (size_t i = n - 1; i-- > 0;)
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];

    const size_t pieces = n - 1;
    c0_.resize(pieces);
    c1_.resize(pieces);
    c2_.resize(pieces);
    c3_.resize(pieces);
    for (size_t i = 0; i < pieces; ++i) {
        const double h = xs_[i + 1] - xs_[i];
        c0_[i] = y[i];
        c1_[i] = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        c2_[i] = m[i] / 2.0;
        c3_[i] = (m[i + 1] - m[i]) / (6.0 * h);
    }

    const double h0 = xs_[1] - xs_[0];
    uniform_h_ = h0;
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::abs((xs_[i + 1] - xs_[i]) - h0) > 1e-12 * h0) {
            uniform_h_ = 0.0;
            break;
        }
    }
}

size_t CubicSpline::piece_index(double t) const
{
    if (uniform_h_ > 0.0) {
        const double u = (t - xs_.front()) / uniform_h_;
        const long i = std::lround(std::floor(u));
        return size_t(std::clamp<long>(i, 0, long(c0_.size()) - 1));
    }
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
    const size_t i = size_t(std::max<long>(1, it - xs_.begin())) - 1;
    return std::min(i, c0_.size() - 1);
}

Complex CubicSpline::value(double t) const
{
    const size_t i = piece_index(t);
    const double tau = t - xs_[i];
    return c0_[i] + tau * (c1_[i] + tau * (c2_[i] + tau * c3_[i]));
}

void fourier_moments(double omega, double h, Complex m[4])
{
    const double wh = omega * h;
    if (std::abs(wh) < 1.0) {
        // series sum_n (i w h)^n / (n! (k+n+1)) * h^{k+1}
        for (int k = 0; k < 4; ++k) {
            Complex sum(0.0);
            Complex term(1.0);
            for (int n = 0;; ++n) {
                const Complex add = term / double(k + n + 1);
                sum += add;
                if (std::abs(add) < 1e-18 * std::abs(sum) && n > 2) break;
                if (n > 40) break;
                term *= I * wh / double(n + 1);
            }
            m[k] = sum * std::pow(h, k + 1);
        }
        return;
    }
    const Complex e = std::exp(I * wh);
    const Complex iw = I * omega;
    m[0] = (e - 1.0) / iw;
    double hk = 1.0;
    for (int k = 1; k < 4; ++k) {
        hk *= h;
        m[k] = (hk * e - double(k) * m[k - 1]) / iw;
    }
}

Complex CubicSpline::fourier_integral(double omega, double a, double b) const
{
    if (empty()) return Complex(0.0);
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    a = std::max(a, x_min());
    b = std::min(b, x_max());
    if (!(a < b)) return Complex(0.0);

    const size_t ia = piece_index(a);
    const size_t ib = piece_index(b);

    Complex total(0.0);
    Complex m[4];

    auto piece_integral = [&](size_t i, double t0, double t1) {
        // integrate the local cubic over [t0, t1] within piece i
        const double tau0 = t0 - xs_[i];
        const double tau1 = t1 - xs_[i];
        // shift so the moment integral starts at 0: poly in (tau0 + s)
        const double d = tau1 - tau0;
        const Complex p0 = c0_[i] + tau0 * (c1_[i] + tau0 * (c2_[i] + tau0 * c3_[i]));
        const Complex p1 = c1_[i] + tau0 * (2.0 * c2_[i] + 3.0 * tau0 * c3_[i]);
        const Complex p2 = c2_[i] + 3.0 * tau0 * c3_[i];
        const Complex p3 = c3_[i];
        fourier_moments(omega, d, m);
        const Complex phase = std::exp(I * (omega * t0));
        return phase * (p0 * m[0] + p1 * m[1] + p2 * m[2] + p3 * m[3]);
    };

    if (ia == ib) return sign * piece_integral(ia, a, b);

    total += piece_integral(ia, a, xs_[ia + 1]);
    total += piece_integral(ib, xs_[ib], b);

    if (uniform_h_ > 0.0 && ib > ia + 1) {
        // interior pieces share h: one set of moments, running phase
        fourier_moments(omega, uniform_h_, m);
        const Complex step = std::exp(I * (omega * uniform_h_));
        Complex phase = std::exp(I * (omega * xs_[ia + 1]));
        Complex acc(0.0);
        for (size_t i = ia + 1; i < ib; ++i) {
            acc += phase * (c0_[i] * m[0] + c1_[i] * m[1] + c2_[i] * m[2] + c3_[i] * m[3]);
            phase *= step;
        }
        total += acc;
    } else {
        for (size_t i = ia + 1; i < ib; ++i)
            total += piece_integral(i, xs_[i], xs_[i + 1]);
    }

    return sign * total;
}

} // namespace ptcorr
