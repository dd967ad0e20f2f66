#include "ptcorr/scattering.hpp"

#include <cmath>
#include <limits>

namespace ptcorr {

namespace {

const Complex I(0.0, 1.0);

bool finite(Complex z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// kappa = sqrt(kz^2 - mu^2) with Im kappa >= 0 (decaying evanescent wave for
// real kz < mu).  Only kappa^2, cos(kappa L) and sinc terms enter the segment
// matrix, so the overall sign of kappa is irrelevant; the choice here keeps
// intermediate exponentials bounded.
Complex kappa_branch(Complex kz, double mu)
{
    Complex k = std::sqrt(kz * kz - mu * mu);
    if (k.imag() < 0.0) k = -k;
    return k;
}

struct SegmentMatrix {
    Complex c;      // cos(kappa L) * e^{-g}
    Complex s_over; // sin(kappa L)/kappa * e^{-g}
    Complex s_mul;  // kappa sin(kappa L) * e^{-g}
    double g;       // scale exponent, Im(kappa) L >= 0
};

// (v, v') propagator across one segment, scaled by e^{-g} with
// g = Im(kappa) L so entries stay O(1) however opaque the segment is.
SegmentMatrix segment_matrix(Complex kz, double mu, double L)
{
    SegmentMatrix out;
    const Complex kap = kappa_branch(kz, mu);
    const Complex w = kap * L;

    if (std::abs(w) < 1e-4) {
        // series in w^2; entire in kappa^2, no branch at the barrier top
        const Complex w2 = w * w;
        out.g = 0.0;
        out.c = 1.0 - w2 / 2.0 + w2 * w2 / 24.0;
        const Complex sinc = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
        out.s_over = L * sinc;
        out.s_mul = kap * kap * L * sinc;
        return out;
    }

    const double g = w.imag(); // >= 0 by branch choice
    out.g = g;
    // e^{i w} e^{g} = e^{i Re w} e^{-g} * e^{2g}; keep both factors bounded
    const Complex ep = std::exp(Complex(0.0, w.real())) * std::exp(-2.0 * g);
    const Complex em = std::exp(Complex(0.0, -w.real()));
    out.c = 0.5 * (ep + em);
    const Complex s = (ep - em) / (2.0 * I);
    out.s_over = s / kap;
    out.s_mul = s * kap;
    return out;
}

} // namespace

void BarrierProfile::validate() const
{
    if (!(a > 0.0)) throw std::invalid_argument("barrier: a must be > 0");
    for (const auto& s : segments) {
        if (!(s.length > 0.0))
            throw std::invalid_argument("barrier: segment length must be > 0");
        if (!(s.cutoff >= 0.0) || !std::isfinite(s.cutoff))
            throw std::invalid_argument("barrier: segment cutoff must be >= 0");
    }
}

TransferMatrix transfer_matrix(const BarrierProfile& profile, Complex kz)
{
    profile.validate();
    if (kz == Complex(0.0, 0.0))
        throw std::invalid_argument("transfer_matrix: kz = 0 degenerates the plane-wave basis");
    if (!finite(kz))
        throw std::invalid_argument("transfer_matrix: kz must be finite");

    // product of per-segment (v, v') propagators, rightmost segment applied last
    Complex p00 = 1.0, p01 = 0.0, p10 = 0.0, p11 = 1.0;
    double scale = 0.0;
    for (const auto& seg : profile.segments) {
        const SegmentMatrix m = segment_matrix(kz, seg.cutoff, seg.length);
        const Complex q00 = m.c * p00 + m.s_over * p10;
        const Complex q01 = m.c * p01 + m.s_over * p11;
        const Complex q10 = -m.s_mul * p00 + m.c * p10;
        const Complex q11 = -m.s_mul * p01 + m.c * p11;
        p00 = q00; p01 = q01; p10 = q10; p11 = q11;
        scale += m.g;
    }

    // conjugate by W(0) = [[1, 1], [i kz, -i kz]] to land in the plane-wave
    // amplitude basis of the stack shifted to (0, D)
    const Complex ik = I * kz;
    TransferMatrix t;
    t.m00 = 0.5 * (p00 + p11 + p01 * ik + p10 / ik);
    t.m01 = 0.5 * (p00 - p11 - p01 * ik + p10 / ik);
    t.m10 = 0.5 * (p00 - p11 + p01 * ik - p10 / ik);
    t.m11 = 0.5 * (p00 + p11 - p01 * ik - p10 / ik);
    t.log_scale = scale;
    return t;
}

ScatteringCoefficients scattering_coefficients(const BarrierProfile& profile, Complex kz)
{
    const TransferMatrix m = transfer_matrix(profile, kz);
    const double D = profile.width();

    ScatteringCoefficients sc;
    sc.kz = kz;

    // T = e^{-i kz D} / m11, with the e^{log_scale} factor carried in logs
    const Complex log_m11 = std::log(m.m11);
    const Complex logT = -I * kz * D - m.log_scale - log_m11;
    sc.logT_mag = logT.real();
    sc.T_phase = logT.imag();
    sc.T = std::exp(logT);
    sc.underflowed = sc.logT_mag < -700.0;

    sc.R = -(m.m10 / m.m11);
    sc.Rprime = m.m01 / m.m11;
    return sc;
}

double b1_residual(const ScatteringCoefficients& sc, const BarrierProfile& profile)
{
    const Complex kz = sc.kz;
    const Complex term1 = sc.T * std::conj(sc.R) * std::exp(-2.0 * I * kz * profile.a);
    const Complex term2 = std::conj(sc.T) * sc.Rprime * std::exp(-2.0 * I * kz * profile.b());
    return std::abs(term1 + term2);
}

Complex reduced_transmission(const BarrierProfile& profile, Complex kz)
{
    if (profile.empty()) return Complex(1.0);
    const ScatteringCoefficients sc = scattering_coefficients(profile, kz);
    return std::exp(Complex(sc.logT_mag, sc.T_phase) + I * kz * profile.width());
}

Complex square_barrier_transmission(double mu, double D, Complex kz)
{
    if (!(mu > 0.0)) throw std::invalid_argument("square_barrier_transmission: mu must be > 0");
    if (!(D > 0.0)) throw std::invalid_argument("square_barrier_transmission: D must be > 0");
    if (!finite(kz) || kz == Complex(0.0, 0.0))
        throw std::invalid_argument("square_barrier_transmission: bad kz");

    // s = sqrt(mu^2 - kz^2) on the physical sheet: upper edge of the cut for
    // real kz > mu, principal square root elsewhere (continuous through the
    // segment (-mu, mu) into the lower half plane).
    Complex s;
    if (kz.imag() == 0.0 && kz.real() > mu)
        s = -I * std::sqrt(Complex(kz.real() * kz.real() - mu * mu));
    else
        s = std::sqrt(mu * mu - kz * kz);

    if (std::abs(s * D) < 1e-4) {
        // removable point at kz = mu: equivalent form regular in kappa^2
        const Complex k2 = kz * kz - mu * mu; // = -s^2
        const Complex w2 = k2 * D * D;
        const Complex cosw = 1.0 - w2 / 2.0 + w2 * w2 / 24.0;
        const Complex sincw = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
        const Complex den = cosw - I * (kz * kz + k2) * D / (2.0 * kz) * sincw;
        return std::exp(-I * kz * D) / den;
    }

    const Complex e2ia = (kz - I * s) / (kz + I * s);
    const Complex e4ia = e2ia * e2ia;
    const Complex damp = std::exp(-D * s);
    return std::exp(-I * kz * D) * damp * (1.0 - e4ia) / (1.0 - e4ia * damp * damp);
}

Complex opaque_transmission_asymptotic(double mu, double D, Complex kz, double threshold)
{
    if (!(mu > 0.0)) throw std::invalid_argument("opaque_transmission_asymptotic: mu must be > 0");
    if (!(D > 0.0)) throw std::invalid_argument("opaque_transmission_asymptotic: D must be > 0");

    Complex s;
    if (kz.imag() == 0.0 && kz.real() > mu)
        s = -I * std::sqrt(Complex(kz.real() * kz.real() - mu * mu));
    else
        s = std::sqrt(mu * mu - kz * kz);

    const double opacity = std::exp(-2.0 * D * s.real());
    if (!(opacity < threshold))
        throw not_opaque_error("opaque_transmission_asymptotic: not opaque enough (e^{-2 D Re s} = " +
                               std::to_string(opacity) + ")");

    if (kz == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
    const Complex u = (kz - I * s) / mu;
    const Complex u2 = u * u;
    return std::exp(-D * s) * (1.0 - u2 * u2);
}

double wigner_phase_time(const BarrierProfile& profile, double omega)
{
    if (!(omega > 0.0)) throw std::invalid_argument("wigner_phase_time: omega must be > 0");
    if (profile.empty()) return 0.0;

    auto t_at = [&](double w) { return scattering_coefficients(profile, Complex(w, 0.0)); };
    {
        const ScatteringCoefficients sc = t_at(omega);
        if (sc.underflowed || sc.logT_mag < -300.0)
            throw std::domain_error("wigner_phase_time: |T| underflows, phase ill-conditioned");
    }

    // unwrap-free central difference arg(T(w+h)/T(w-h)) / 2h over a ladder of
    // steps; keep the estimate where successive values agree best
    auto estimate = [&](double h) {
        const Complex ratio = t_at(omega + h).T / t_at(omega - h).T;
        return std::arg(ratio) / (2.0 * h);
    };
    double h = 1e-2 * std::max(omega, 1.0);
    double prev = estimate(h);
    double best = prev;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 16; ++iter) {
        h *= 0.5;
        const double est = estimate(h);
        const double gap = std::abs(est - prev);
        if (gap < best_gap) {
            best_gap = gap;
            best = est;
        }
        if (gap <= 1e-9 * std::max(1.0, std::abs(est))) return est;
        prev = est;
    }
    return best;
}

} // namespace ptcorr
