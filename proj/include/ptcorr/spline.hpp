#ifndef PTCORR_SPLINE_HPP
#define PTCORR_SPLINE_HPP

#include <complex>
#include <vector>

namespace ptcorr {

using Complex = std::complex<double>;

// Natural cubic spline with complex values on an increasing real grid.
// Supports exact piecewise Fourier integrals int e^{i omega t} S(t) dt, which
// is what makes the oscillatory time quadratures in the pipeline cheap.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, const std::vector<Complex>& y);

    Complex value(double t) const;

    // int_a^b S(t) e^{i omega t} dt, exact per spline piece
    Complex fourier_integral(double omega, double a, double b) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    bool empty() const { return xs_.empty(); }
    size_t size() const { return xs_.size(); }

private:
    size_t piece_index(double t) const;

    std::vector<double> xs_;
    std::vector<Complex> c0_, c1_, c2_, c3_; // per piece, local coordinate
    double uniform_h_ = 0.0;                 // > 0 when the grid is uniform
};

// moments m_k = int_0^h tau^k e^{i omega tau} dtau, k = 0..3
void fourier_moments(double omega, double h, Complex m[4]);

} // namespace ptcorr

#endif
