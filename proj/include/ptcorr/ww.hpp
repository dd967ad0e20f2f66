#ifndef PTCORR_WW_HPP
#define PTCORR_WW_HPP

#include <memory>
#include <optional>

#include "ptcorr/quadrature.hpp"
#include "ptcorr/scattering.hpp"
#include "ptcorr/spline.hpp"

namespace ptcorr {

// Two-level source with excitation frequency Omega and exponential-decay
// rate Gamma (c(t) = e^{-Gamma t/2}).  `norm` lumps |Q_ge|^2 sigma into one
// overall scale; amplitudes internally carry Q_ge = 1.
struct SourceParams {
    double omega = 20.0;
    double gamma = 0.05;
    double norm = 1.0;

    Complex pole() const { return Complex(omega, -0.5 * gamma); }
    void validate() const;
};

// Detector position on the axis, z > b.  Times are only trusted inside the
// future light cone of the preparation event: (t - z) * Omega >= margin.
struct Geometry {
    double z = 40.0;
    double light_cone_margin = 20.0;

    void validate(const BarrierProfile& profile) const;
    double min_time(const SourceParams& src) const
    {
        return z + light_cone_margin / src.omega;
    }
};

enum class AmplitudeMode { no_barrier_closed, opaque_asymptotic, numeric };

enum class WaveDirection { plus, minus }; // incoming from the left / right

struct light_cone_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Mode functions of the stack at the source (z = 0 < a).
Complex mode_at_source(const ScatteringCoefficients& sc, const BarrierProfile& profile,
                       WaveDirection s);

// One-photon coefficient A^s_{wr,wz}(t) of the decayed-source state.
Complex one_photon_coefficient(double kr, double kz, WaveDirection s, double t,
                               const SourceParams& src, const BarrierProfile& profile);

// sum_s v_s*(kz|0) v_s(kz|z), computed directly from the asymptotic forms and
// via the reduced form T e^{i kz z} + T* e^{-i kz z}; the two must agree.
struct ModeOverlap {
    Complex direct{0.0};
    Complex reduced{0.0};
    double mismatch() const { return std::abs(direct - reduced); }
};
ModeOverlap summed_mode_overlap(double kz, double z, const BarrierProfile& profile);

// F(omega) = int_0^omega T(w) e^{i w z} dw  (equivalently scriptT with phase
// z - D).  numeric: oscillatory quadrature; opaque: first order in 1/(z-D);
// no-barrier: (e^{i omega z} - 1)/(i z).
IntegralResult transmitted_wave_integral(double omega, const BarrierProfile& profile,
                                         double z, const QuadratureConfig& cfg,
                                         AmplitudeMode mode);

// Shared evaluation state for one (source, geometry, barrier, config, mode)
// tuple.  Numeric mode precomputes the endpoint-ray transform of T and the
// kernel spectral integrals on splines; everything is immutable afterwards
// and safe to share across threads.
class WwContext {
public:
    // t_max: largest click time the numeric tables must cover (ignored by
    // closed modes).  smoothing_epsilon > 0 replaces sharp step functions in
    // the closed modes by erf ramps of that width.
    WwContext(SourceParams src, Geometry geom, BarrierProfile profile,
              QuadratureConfig cfg, AmplitudeMode mode, double t_max = 0.0,
              double smoothing_epsilon = 0.0);

    const SourceParams& source() const { return src_; }
    const Geometry& geometry() const { return geom_; }
    const BarrierProfile& profile() const { return profile_; }
    const QuadratureConfig& config() const { return cfg_; }
    AmplitudeMode mode() const { return mode_; }
    double omega_cut() const { return W_; }
    double effective_distance() const { return z_eff_; }

    // reduced transmission scriptT(Omega - i Gamma/2) carried by the closed
    // opaque mode; 1 with no barrier
    Complex transmission_factor() const { return factor_; }

    // <g,vac| [phi(t, z), P_g(t1)] |e,vac>  (Q_ge = 1)
    Complex commutator_kernel(double t, double t1) const;

    // script M_omega(t2): first term of the joint amplitude
    Complex single_time_amplitude(double omega, double t2) const;

    // M_omega(t1, t2)
    Complex joint_amplitude(double omega, double t1, double t2) const;

    // product-form matrix element <g,vac|P_g(t1) phi(t, z)|e,vac>, evaluated
    // by its own semi-infinite pole quadrature (no kernel tables); equals
    // minus the commutator kernel at t1 = 0
    Complex product_matrix_element(double t) const;

    // decomposition I_1..I_4 of the kernel spectral sum (tests/diagnostics)
    Complex i_term(int j, double t, double t1) const;

    // spectral sum S(w) = F(w) + conj(F(w)) on the real axis
    Complex spectral_sum(double omega) const;
    // same through fresh oscillatory quadrature, bypassing the ray tables
    Complex spectral_sum_direct(double omega) const;

    // kernel spectral integrals: J_A = int S/(w - pole), J_B(s) = the same
    // with e^{-i w s}; table-backed and exact (per-call) variants
    Complex kernel_ja() const;
    Complex kernel_jb(double s) const;
    Complex kernel_jb_exact(double s) const;

    double smoothing_epsilon() const { return smooth_eps_; }
    double table_error_estimate() const { return table_err_; }

private:
    void build_numeric_tables(double t_max);
    Complex ray_transform(Complex anchor) const; // -i int T(anchor + i eta) e^{-eta z} deta
    Complex closed_single_time(double omega, double t2) const;
    double theta(double x) const;
    void require_cone(double t, const char* what) const;

    SourceParams src_;
    Geometry geom_;
    BarrierProfile profile_;
    QuadratureConfig cfg_;
    AmplitudeMode mode_;
    double smooth_eps_ = 0.0;

    double z_eff_ = 0.0;   // z for numeric/free, z - D in the opaque closed mode
    Complex factor_{1.0};  // scriptT(pole) in the opaque closed mode
    double W_ = 0.0;       // spectral truncation Omega + K Gamma

    // numeric-mode tables
    Complex rayA_{0.0};            // i int T(i eta) e^{-eta z} deta
    Complex Bp_{0.0}, Cp_{0.0};    // endpoint transform at the pole (and mirror)
    CubicSpline Btilde_, Ctilde_;  // pole-subtracted endpoint transforms
    CubicSpline jb_;               // J_B(s) table
    Complex ja_{0.0};
    Complex fiBz_{0.0}, fiCmz_{0.0};
    Complex seg0_{0.0};
    double table_err_ = 0.0;
};

} // namespace ptcorr

#endif
