#ifndef PTCORR_SCATTERING_HPP
#define PTCORR_SCATTERING_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptcorr {

using Complex = std::complex<double>;

// Piecewise-constant barrier on (a, b).  Each segment carries a cutoff
// frequency mu; the potential on the segment is V = mu^2, so waves with
// kz < mu are evanescent there.  Units c = hbar = 1.
struct BarrierSegment {
    double length = 0.0;
    double cutoff = 0.0;
};

struct BarrierProfile {
    double a = 1.0;
    std::vector<BarrierSegment> segments;

    double width() const
    {
        double d = 0.0;
        for (const auto& s : segments) d += s.length;
        return d;
    }
    double b() const { return a + width(); }
    bool empty() const { return segments.empty(); }
    double max_cutoff() const
    {
        double m = 0.0;
        for (const auto& s : segments) m = std::max(m, s.cutoff);
        return m;
    }

    void validate() const;

    static BarrierProfile none(double a = 1.0) { return BarrierProfile{a, {}}; }
    static BarrierProfile square(double a, double width, double mu)
    {
        return BarrierProfile{a, {BarrierSegment{width, mu}}};
    }

    // Segments in reverse order (mirror of the stack); used for the
    // reciprocity check T' = T.
    BarrierProfile reversed() const
    {
        BarrierProfile r{a, {segments.rbegin(), segments.rend()}};
        return r;
    }
};

// Transfer matrix across the segment stack in the (v, v') basis, referenced
// to the stack shifted to (0, D).  The true matrix is e^{log_scale} * m;
// the scalar is factored out so deeply evanescent stacks do not overflow.
struct TransferMatrix {
    Complex m00{1.0}, m01{0.0}, m10{0.0}, m11{1.0};
    double log_scale = 0.0;

    // |det| of the true matrix; equals 1 for any kz (Wronskian).
    double det_modulus() const
    {
        return std::abs(m00 * m11 - m01 * m10) * std::exp(2.0 * log_scale);
    }
};

// Scattering amplitudes in the asymptotic conventions
//   v+ : e^{i kz (z-a)} + R e^{-i kz (z-a)}   (z < a),   T e^{i kz (z-a)} (z > b)
//   v- : e^{-i kz (z-b)} + R' e^{i kz (z-b)}  (z > b),   T e^{-i kz (z-b)} (z < a)
// so T, R, R' coincide with those of the stack shifted to the origin.
struct ScatteringCoefficients {
    Complex T{1.0};
    Complex R{0.0};
    Complex Rprime{0.0};
    Complex kz{0.0};

    // log-magnitude / phase representation of T; valid even when T itself
    // underflows (very opaque stack at real kz well below cutoff).
    double logT_mag = 0.0;
    double T_phase = 0.0;
    bool underflowed = false;

    double unitarity_residual() const
    {
        return std::abs(std::norm(T) + std::norm(R) - 1.0);
    }
};

// Residual of the reflection identity T R* e^{-2i kz a} + T* R' e^{-2i kz b},
// zero for real kz by flux conservation.
double b1_residual(const ScatteringCoefficients& sc, const BarrierProfile& profile);

TransferMatrix transfer_matrix(const BarrierProfile& profile, Complex kz);

ScatteringCoefficients scattering_coefficients(const BarrierProfile& profile, Complex kz);

// Closed-form transmission amplitude of a single rectangular barrier of
// cutoff mu and width D, evaluated on the physical sheet (upper edge of the
// cut along real kz > mu).  Switches to the equivalent regular form near the
// kz = mu threshold.
Complex square_barrier_transmission(double mu, double D, Complex kz);

// Reduced transmission scriptT(kz) = T(kz) e^{+i kz D} (free-flight phase
// across the barrier stripped); 1 for an empty profile.
Complex reduced_transmission(const BarrierProfile& profile, Complex kz);

// Leading opaque-limit form of the reduced transmission for a single
// rectangular barrier; requires e^{-2 D Re sqrt(mu^2-kz^2)} below `threshold`.
Complex opaque_transmission_asymptotic(double mu, double D, Complex kz,
                                       double threshold = 1e-8);

// Stationary-phase delay d(arg T)/d(omega), central differences with
// adaptive step.  Comparison output only.
double wigner_phase_time(const BarrierProfile& profile, double omega);

struct not_opaque_error : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace ptcorr

#endif
