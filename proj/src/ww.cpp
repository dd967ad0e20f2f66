#include "ptcorr/ww.hpp"

#include <cmath>

#include "ptcorr/expint.hpp"

namespace ptcorr {

namespace {

const Complex I(0.0, 1.0);
constexpr double kTwoPi = 6.283185307179586;
constexpr double kKernelNorm = 1.0 / (8.0 * M_PI * M_PI); // Q_ge/8pi^2 with Q_ge = 1
constexpr double kOpaqueThreshold = 1e-8;

// aggregate opacity e^{-2 sum_i L_i Re sqrt(mu_i^2 - Omega^2)}
double opacity_parameter(const BarrierProfile& profile, double omega)
{
    double expo = 0.0;
    for (const auto& seg : profile.segments) {
        if (seg.cutoff > omega)
            expo += seg.length * std::sqrt(seg.cutoff * seg.cutoff - omega * omega);
    }
    return std::exp(-2.0 * expo);
}

Complex interval_phase_integral(Complex rate_exponent, double a, double b)
{
    // int_a^b e^{i r t} dt for complex r
    const Complex ir = I * rate_exponent;
    if (std::abs(ir) * (b - a) < 1e-8) {
        const Complex x = ir * (b - a);
        return (b - a) * (1.0 + x / 2.0 + x * x / 6.0) * std::exp(ir * a);
    }
    return (std::exp(ir * b) - std::exp(ir * a)) / ir;
}

} // namespace

void SourceParams::validate() const
{
    if (!(omega > 0.0)) throw std::invalid_argument("source: omega must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("source: gamma must be > 0");
    if (!(gamma < omega)) throw std::invalid_argument("source: gamma must be < omega (WW validity)");
    if (!(norm > 0.0)) throw std::invalid_argument("source: norm must be > 0");
}

void Geometry::validate(const BarrierProfile& profile) const
{
    profile.validate();
    if (!(z > profile.b()))
        throw std::invalid_argument("geometry: need 0 < a < b < z");
    if (!(light_cone_margin > 0.0))
        throw std::invalid_argument("geometry: light_cone_margin must be > 0");
}

Complex mode_at_source(const ScatteringCoefficients& sc, const BarrierProfile& profile,
                       WaveDirection s)
{
    const Complex kz = sc.kz;
    if (s == WaveDirection::plus)
        return std::exp(-I * kz * profile.a) + sc.R * std::exp(I * kz * profile.a);
    return sc.T * std::exp(I * kz * profile.b());
}

Complex one_photon_coefficient(double kr, double kz, WaveDirection s, double t,
                               const SourceParams& src, const BarrierProfile& profile)
{
    src.validate();
    if (!(kr >= 0.0) || !(kz > 0.0) || !(t >= 0.0))
        throw std::invalid_argument("one_photon_coefficient: need kr >= 0, kz > 0, t >= 0");
    if (kr == 0.0) return Complex(0.0);

    const double omega = std::hypot(kr, kz);
    const ScatteringCoefficients sc = scattering_coefficients(profile, Complex(kz, 0.0));
    const Complex vs0 = mode_at_source(sc, profile, s);
    const Complex dw = Complex(omega, 0.0) - src.pole();
    const Complex bracket = (1.0 - std::exp(I * dw * t)) / dw;
    return (1.0 / kTwoPi) * std::sqrt(kr / (2.0 * omega)) * std::conj(vs0) * bracket;
}

ModeOverlap summed_mode_overlap(double kz, double z, const BarrierProfile& profile)
{
    profile.validate();
    if (!(z > profile.b()))
        throw std::invalid_argument("summed_mode_overlap: detector must sit beyond the barrier");
    if (!(kz > 0.0))
        throw std::invalid_argument("summed_mode_overlap: kz must be > 0");

    const ScatteringCoefficients sc = scattering_coefficients(profile, Complex(kz, 0.0));
    const double a = profile.a;
    const double b = profile.b();

    const Complex vplus_0 = std::exp(-I * Complex(kz) * a) + sc.R * std::exp(I * Complex(kz) * a);
    const Complex vplus_z = sc.T * std::exp(I * Complex(kz) * (z - a));
    const Complex vminus_0 = sc.T * std::exp(I * Complex(kz) * b);
    const Complex vminus_z =
        std::exp(-I * Complex(kz) * (z - b)) + sc.Rprime * std::exp(I * Complex(kz) * (z - b));

    ModeOverlap out;
    out.direct = std::conj(vplus_0) * vplus_z + std::conj(vminus_0) * vminus_z;
    out.reduced = sc.T * std::exp(I * Complex(kz) * z) + std::conj(sc.T) * std::exp(-I * Complex(kz) * z);
    return out;
}

IntegralResult transmitted_wave_integral(double omega, const BarrierProfile& profile,
                                         double z, const QuadratureConfig& cfg,
                                         AmplitudeMode mode)
{
    profile.validate();
    if (omega < 0.0)
        throw std::invalid_argument("transmitted_wave_integral: omega must be >= 0");
    IntegralResult res;
    if (omega == 0.0) return res; // empty range

    const double D = profile.width();
    const double reach = z - D;

    switch (mode) {
    case AmplitudeMode::no_barrier_closed: {
        if (!profile.empty())
            throw std::invalid_argument("transmitted_wave_integral: no-barrier mode with a barrier");
        res.value = (std::exp(I * Complex(omega) * z) - 1.0) / (I * z);
        return res;
    }
    case AmplitudeMode::opaque_asymptotic: {
        if (profile.empty())
            throw std::invalid_argument("transmitted_wave_integral: opaque mode needs a barrier");
        const Complex st = reduced_transmission(profile, Complex(omega, 0.0));
        res.value = std::exp(I * Complex(omega) * reach) * st / (I * reach);
        return res;
    }
    case AmplitudeMode::numeric: {
        std::vector<double> splits;
        for (const auto& seg : profile.segments)
            if (seg.cutoff > 0.0 && seg.cutoff < omega) splits.push_back(seg.cutoff);
        auto f = [&](Complex w) { return reduced_transmission(profile, w); };
        return integrate_oscillatory_finite(f, 0.0, omega, reach, cfg,
                                            /*analytic_upper=*/true, splits);
    }
    }
    return res;
}

WwContext::WwContext(SourceParams src, Geometry geom, BarrierProfile profile,
                     QuadratureConfig cfg, AmplitudeMode mode, double t_max,
                     double smoothing_epsilon)
    : src_(src), geom_(geom), profile_(std::move(profile)), cfg_(cfg), mode_(mode),
      smooth_eps_(smoothing_epsilon)
{
    src_.validate();
    geom_.validate(profile_);
    cfg_.validate();
    if (smooth_eps_ < 0.0)
        throw std::invalid_argument("ww: smoothing epsilon must be >= 0");

    W_ = cfg_.omega_cut(src_.pole());
    factor_ = reduced_transmission(profile_, src_.pole());

    switch (mode_) {
    case AmplitudeMode::no_barrier_closed:
        if (!profile_.empty())
            throw std::invalid_argument("ww: no-barrier closed mode needs an empty barrier");
        z_eff_ = geom_.z;
        factor_ = Complex(1.0);
        break;
    case AmplitudeMode::opaque_asymptotic: {
        if (profile_.empty())
            throw std::invalid_argument("ww: opaque mode needs a barrier");
        const double opacity = opacity_parameter(profile_, src_.omega);
        if (!(opacity < kOpaqueThreshold))
            throw not_opaque_error("ww: barrier not opaque enough for the asymptotic mode (e^{-2 sum} = " +
                                   std::to_string(opacity) + ")");
        z_eff_ = geom_.z - profile_.width();
        break;
    }
    case AmplitudeMode::numeric:
        z_eff_ = geom_.z;
        if (!(t_max >= geom_.min_time(src_)))
            throw std::invalid_argument("ww: numeric mode needs t_max at least z + margin/omega");
        build_numeric_tables(t_max);
        break;
    }
}

Complex WwContext::ray_transform(Complex anchor) const
{
    const double z = geom_.z;
    QuadratureConfig rcfg = cfg_;
    rcfg.rel_tol = std::min(cfg_.rel_tol, 1e-11);
    rcfg.abs_tol = 1e-280;
    rcfg.max_subdivisions = std::max(cfg_.max_subdivisions, 400);

    const double xi_max = 45.0;
    const double splits[4] = {0.3, 1.5, 6.0, 20.0};
    auto f = [&](double xi) {
        const Complex kz = anchor + I * (xi / z);
        const ScatteringCoefficients sc = scattering_coefficients(profile_, kz);
        return sc.T * std::exp(-xi);
    };
    const IntegralResult r = integrate_adaptive(f, 0.0, xi_max, rcfg, splits);
    return -I / z * r.value;
}

void WwContext::build_numeric_tables(double t_max)
{
    const double z = geom_.z;
    const double D = profile_.width();
    const Complex p = src_.pole();

    // endpoint-ray transform B(w) = -i int T(w + i eta) e^{-eta z} deta on [0, W]
    const double step_b = std::min(src_.omega / 40.0, 0.25 / (1.0 + D));
    const size_t nb = size_t(std::ceil(W_ / step_b)) + 1;
    std::vector<double> bx(nb);
    std::vector<Complex> bv(nb);
    for (size_t i = 0; i < nb; ++i) bx[i] = std::min(W_, double(i) * step_b);
    bx.back() = W_;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long i = 0; i < long(nb); ++i) bv[i] = ray_transform(Complex(bx[i], 0.0));

    rayA_ = -ray_transform(Complex(0.0, 0.0));
    Bp_ = ray_transform(p);
    Cp_ = std::conj(ray_transform(std::conj(p)));

    // F(0) = 0 exactly; the residual measures the ray quadrature quality
    table_err_ = std::abs(rayA_ + bv.front()) /
                 std::max(std::abs(rayA_), std::abs(Bp_));

    std::vector<Complex> btv(nb), ctv(nb);
    for (size_t i = 0; i < nb; ++i) {
        const Complex dw = Complex(bx[i], 0.0) - p;
        btv[i] = (bv[i] - Bp_) / dw;
        ctv[i] = (std::conj(bv[i]) - Cp_) / dw;
    }
    Btilde_ = CubicSpline(bx, btv);
    Ctilde_ = CubicSpline(std::move(bx), ctv);

    seg0_ = fourier_pole_segment(p, 0.0, W_);
    fiBz_ = Btilde_.fourier_integral(z, 0.0, W_) + Bp_ * fourier_pole_segment(p, -z, W_);
    fiCmz_ = Ctilde_.fourier_integral(-z, 0.0, W_) + Cp_ * fourier_pole_segment(p, z, W_);
    ja_ = 2.0 * rayA_.real() * seg0_ + fiBz_ + fiCmz_;

    // J_B(s) table; the kernel front sits at s = z - D and oscillates at the
    // source frequency, so sample well inside one period
    const double step_s = kTwoPi / (16.0 * src_.omega);
    const double s_max = std::max(t_max, z) + 4.0 * step_s;
    const size_t ns = size_t(std::ceil(s_max / step_s)) + 1;
    std::vector<double> sx(ns);
    std::vector<Complex> sv(ns);
    for (size_t i = 0; i < ns; ++i) sx[i] = double(i) * step_s;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 32)
#endif
    for (long i = 0; i < long(ns); ++i) sv[i] = kernel_jb_exact(sx[i]);
    jb_ = CubicSpline(std::move(sx), sv);

    // spline fidelity at off-node points
    double worst = 0.0;
    for (int k = 1; k <= 16; ++k) {
        const double s = (z - D) + (k - 8.5) * 0.37 * step_s * 16.0;
        if (s < 0.0 || s > s_max) continue;
        const Complex exact = kernel_jb_exact(s);
        const double scale = std::max(std::abs(exact), std::abs(Bp_));
        if (scale > 0.0)
            worst = std::max(worst, std::abs(jb_.value(s) - exact) / scale);
    }
    table_err_ = std::max(table_err_, worst);
}

Complex WwContext::kernel_jb_exact(double s) const
{
    const double z = geom_.z;
    const Complex p = src_.pole();
    Complex out = 2.0 * rayA_.real() * fourier_pole_segment(p, s, W_);
    out += Btilde_.fourier_integral(z - s, 0.0, W_) + Bp_ * fourier_pole_segment(p, s - z, W_);
    out += Ctilde_.fourier_integral(-(z + s), 0.0, W_) + Cp_ * fourier_pole_segment(p, s + z, W_);
    return out;
}

Complex WwContext::kernel_ja() const
{
    if (mode_ != AmplitudeMode::numeric)
        throw std::logic_error("ww: kernel spectral integrals exist in numeric mode only");
    return ja_;
}

Complex WwContext::kernel_jb(double s) const
{
    if (mode_ != AmplitudeMode::numeric)
        throw std::logic_error("ww: kernel spectral integrals exist in numeric mode only");
    if (s <= jb_.x_max()) return jb_.value(s);
    return kernel_jb_exact(s);
}

Complex WwContext::spectral_sum(double omega) const
{
    if (mode_ != AmplitudeMode::numeric)
        throw std::logic_error("ww: spectral sum tables exist in numeric mode only");
    const Complex p = src_.pole();
    const Complex B = Btilde_.value(omega) * (Complex(omega, 0.0) - p) + Bp_;
    const Complex phase = std::exp(I * Complex(omega) * geom_.z);
    return 2.0 * rayA_.real() + phase * B + std::conj(phase * B);
}

Complex WwContext::spectral_sum_direct(double omega) const
{
    const IntegralResult F =
        transmitted_wave_integral(omega, profile_, geom_.z, cfg_, AmplitudeMode::numeric);
    return F.value + std::conj(F.value);
}

double WwContext::theta(double x) const
{
    if (smooth_eps_ <= 0.0) return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5);
    return 0.5 * (1.0 + std::erf(x / (smooth_eps_ * std::sqrt(2.0))));
}

void WwContext::require_cone(double t, const char* what) const
{
    if ((t - geom_.z) * src_.omega < geom_.light_cone_margin)
        throw light_cone_error(std::string(what) +
                               ": click time violates the Wigner-Weisskopf light-cone restriction "
                               "(t - z) * omega >= margin");
}

Complex WwContext::commutator_kernel(double t, double t1) const
{
    if (!(t1 >= 0.0) || !(t >= t1))
        throw std::invalid_argument("commutator_kernel: need 0 <= t1 <= t");
    require_cone(t, "commutator_kernel");

    const Complex p = src_.pole();
    if (mode_ == AmplitudeMode::numeric) {
        return kKernelNorm * (std::exp(-I * p * t) * ja_ -
                              std::exp(-I * p * t1) * kernel_jb(t - t1));
    }
    const double front = t - t1 - z_eff_;
    const Complex damp = std::exp(-I * p * (t - z_eff_));
    return factor_ / (4.0 * M_PI * z_eff_) * theta(front) * damp;
}

Complex WwContext::closed_single_time(double omega, double t2) const
{
    const Complex p = src_.pole();
    const Complex dw = Complex(omega, 0.0) - p;
    const Complex lead = I * factor_ / (4.0 * M_PI * z_eff_) * std::exp(I * p * z_eff_);
    return lead * (std::exp(I * dw * t2) - std::exp(I * dw * z_eff_)) / dw;
}

Complex WwContext::single_time_amplitude(double omega, double t2) const
{
    if (!(t2 >= 0.0))
        throw std::invalid_argument("single_time_amplitude: t2 must be >= 0");
    if (mode_ != AmplitudeMode::numeric) return closed_single_time(omega, t2);

    require_cone(t2, "single_time_amplitude");
    if (t2 > jb_.x_max())
        throw std::invalid_argument("single_time_amplitude: t2 beyond the table horizon t_max");
    const Complex p = src_.pole();
    const Complex lam = interval_phase_integral(Complex(omega, 0.0) - p, 0.0, t2);
    return -kKernelNorm * (ja_ * lam - jb_.fourier_integral(omega, 0.0, t2));
}

Complex WwContext::joint_amplitude(double omega, double t1, double t2) const
{
    if (!(t1 >= 0.0) || !(t2 >= 0.0))
        throw std::invalid_argument("joint_amplitude: times must be >= 0");
    if (t2 <= t1) return single_time_amplitude(omega, t2); // detector clicked first

    if (mode_ != AmplitudeMode::numeric) {
        return theta(t1 + z_eff_ - t2) * closed_single_time(omega, t2) +
               theta(t2 - t1 - z_eff_) * closed_single_time(omega, t1 + z_eff_);
    }

    require_cone(t2, "joint_amplitude");
    require_cone(t1, "joint_amplitude");
    const Complex p = src_.pole();
    const Complex m2 = single_time_amplitude(omega, t2);
    const Complex lam = interval_phase_integral(Complex(omega, 0.0) - p, t1, t2);
    const Complex tail = std::exp(-I * p * t1) * std::exp(I * Complex(omega) * t1) *
                         jb_.fourier_integral(omega, 0.0, t2 - t1);
    return m2 + kKernelNorm * (ja_ * lam - tail);
}

Complex WwContext::product_matrix_element(double t) const
{
    if (mode_ != AmplitudeMode::numeric)
        throw std::logic_error("ww: product matrix element is a numeric-mode check");
    require_cone(t, "product_matrix_element");

    const Complex p = src_.pole();
    const Complex pole_phase = std::exp(-I * p * t);
    auto f = [&](double w) {
        return (std::exp(-I * Complex(w) * t) - pole_phase) * spectral_sum(w);
    };
    const double rate = std::max(0.5, std::min(std::abs(t - geom_.z), geom_.z));
    const IntegralResult r = integrate_pole_semiinfinite(f, p, cfg_, rate);
    return kKernelNorm * r.value;
}

Complex WwContext::i_term(int j, double t, double t1) const
{
    if (mode_ != AmplitudeMode::numeric)
        throw std::logic_error("ww: I_j decomposition exists in numeric mode only");
    const double z = geom_.z;
    const Complex p = src_.pole();
    const double s = t - t1;

    // T is real on the imaginary frequency axis, so the constant parts of the
    // two inner primitives are conjugate-imaginary and cancel between the
    // j and j+2 members; each I_j carries the oscillatory part only.
    switch (j) {
    case 1:
        return std::exp(-I * p * t) * fiBz_;
    case 3:
        return std::exp(-I * p * t) * fiCmz_;
    case 2:
        return -std::exp(-I * p * t1) *
               (Btilde_.fourier_integral(z - s, 0.0, W_) +
                Bp_ * fourier_pole_segment(p, s - z, W_));
    case 4:
        return -std::exp(-I * p * t1) *
               (Ctilde_.fourier_integral(-(z + s), 0.0, W_) +
                Cp_ * fourier_pole_segment(p, s + z, W_));
    default:
        throw std::invalid_argument("i_term: j must be 1..4");
    }
}

} // namespace ptcorr
