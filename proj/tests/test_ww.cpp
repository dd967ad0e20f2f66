#include "doctest.h"

#include <random>

#include "ptcorr/ww.hpp"

using namespace ptcorr;

namespace {
const Complex I(0.0, 1.0);

SourceParams default_src()
{
    return SourceParams{20.0, 0.05, 1.0};
}

Geometry default_geom()
{
    return Geometry{40.0, 20.0};
}

QuadratureConfig qcfg()
{
    QuadratureConfig c;
    c.rel_tol = 1e-9;
    return c;
}
} // namespace

TEST_CASE("one-photon coefficient")
{
    const SourceParams src = default_src();
    const BarrierProfile prof = BarrierProfile::none();

    CHECK(std::abs(one_photon_coefficient(1.0, 1.0, WaveDirection::plus, 0.0, src, prof)) == 0.0);

    // long-time limit at resonance: |A| -> (1/2pi) sqrt(kr/2w) |v| / (Gamma/2)
    {
        const double kz = 12.0, t = 4000.0;
        const double kr = std::sqrt(src.omega * src.omega - kz * kz);
        const ScatteringCoefficients sc = scattering_coefficients(prof, Complex(kz, 0.0));
        const double vmag = std::abs(mode_at_source(sc, prof, WaveDirection::plus));
        const double expect =
            vmag * std::sqrt(kr / (2.0 * src.omega)) / (2.0 * M_PI * 0.5 * src.gamma);
        const double got =
            std::abs(one_photon_coefficient(kr, kz, WaveDirection::plus, t, src, prof));
        CHECK(got == doctest::Approx(expect).epsilon(1e-8));
    }

    // oracle: direct quadrature of the defining time integral
    {
        const double kr = 1.0, kz = 1.0, t = 10.0;
        const double om = std::hypot(kr, kz);
        const BarrierProfile barrier = BarrierProfile::square(1.0, 1.0, 2.0);
        const ScatteringCoefficients sc = scattering_coefficients(barrier, Complex(kz, 0.0));
        const Complex vstar = std::conj(mode_at_source(sc, barrier, WaveDirection::plus));
        const Complex matel = vstar / (2.0 * M_PI) * std::sqrt(kr / (2.0 * om));

        // A(t) = -i matel int_0^t e^{i(om - pole) t'} dt' by fine Simpson panels
        const Complex rate = I * (Complex(om) - src.pole());
        Complex acc(0.0);
        const int n = 4000;
        const double h = t / n;
        for (int k = 0; k < n; ++k) {
            const double a = k * h;
            acc += h / 6.0 *
                   (std::exp(rate * a) + 4.0 * std::exp(rate * (a + 0.5 * h)) +
                    std::exp(rate * (a + h)));
        }
        const Complex oracle = -I * matel * acc;
        const Complex got = one_photon_coefficient(kr, kz, WaveDirection::plus, t, src, barrier);
        CHECK(std::abs(got - oracle) < 1e-10 * std::abs(oracle));
    }

    CHECK_THROWS_AS(one_photon_coefficient(1.0, 0.0, WaveDirection::plus, 1.0, src, prof),
                    std::invalid_argument);
}

TEST_CASE("summed mode overlap")
{
    // no barrier: 2 cos(kz z)
    {
        const ModeOverlap ov = summed_mode_overlap(1.3, 10.0, BarrierProfile::none());
        CHECK(std::abs(ov.direct - 2.0 * std::cos(1.3 * 10.0)) < 1e-13);
        CHECK(ov.mismatch() < 1e-14);
    }
    // rectangular barrier case from the amplitude reduction
    {
        const BarrierProfile prof = BarrierProfile::square(1.0, 1.0, 2.0);
        const ModeOverlap ov = summed_mode_overlap(1.0, 10.0, prof);
        CHECK(ov.mismatch() < 1e-12);
    }
    // property over random stacks
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        BarrierProfile prof;
        prof.a = 0.5 + 2.0 * u01(rng);
        const int nseg = 1 + int(u01(rng) * 3.0);
        for (int i = 0; i < nseg; ++i)
            prof.segments.push_back(BarrierSegment{0.2 + 1.5 * u01(rng), 6.0 * u01(rng)});
        const double kz = 0.05 + 3.0 * std::max(1.0, prof.max_cutoff()) * u01(rng);
        const double z = prof.b() + 0.5 + 20.0 * u01(rng);
        const ModeOverlap ov = summed_mode_overlap(kz, z, prof);
        CHECK(ov.mismatch() < 1e-11 * std::max(1.0, std::abs(ov.reduced)));
    }
    CHECK_THROWS_AS(summed_mode_overlap(1.0, 1.5, BarrierProfile::square(1.0, 1.0, 2.0)),
                    std::invalid_argument);
}

TEST_CASE("transmitted wave integral")
{
    const QuadratureConfig cfg = qcfg();
    const double z = 40.0;

    // no barrier closed form and the sine combination
    {
        const double om = 2.7;
        const auto F = transmitted_wave_integral(om, BarrierProfile::none(), z, cfg,
                                                 AmplitudeMode::no_barrier_closed);
        const Complex expect = (std::exp(I * Complex(om) * z) - 1.0) / (I * z);
        CHECK(std::abs(F.value - expect) < 1e-14);
        const Complex sum = F.value + std::conj(F.value);
        CHECK(sum.real() == doctest::Approx(2.0 * std::sin(om * z) / z).epsilon(1e-12));

        const auto Fn = transmitted_wave_integral(om, BarrierProfile::none(), z, cfg,
                                                  AmplitudeMode::numeric);
        CHECK(std::abs(Fn.value - expect) < 1e-7 * std::abs(expect));
    }

    // omega -> 0 gives the empty range
    CHECK(std::abs(transmitted_wave_integral(0.0, BarrierProfile::none(), z, cfg,
                                             AmplitudeMode::numeric)
                       .value) == 0.0);

    // opaque barrier: numeric vs first-order endpoint form at the 1/(z-D) scale
    {
        const BarrierProfile prof = BarrierProfile::square(1.0, 1.0, 100.0);
        const double om = 20.0;
        const auto num =
            transmitted_wave_integral(om, prof, z, cfg, AmplitudeMode::numeric);
        const auto asym =
            transmitted_wave_integral(om, prof, z, cfg, AmplitudeMode::opaque_asymptotic);
        CHECK(std::abs(num.value - asym.value) < 3e-2 * std::abs(asym.value));
        CHECK(std::abs(num.value - asym.value) > 1e-4 * std::abs(asym.value));
    }
}

TEST_CASE("commutator kernel: closed form and numeric pipeline")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const QuadratureConfig cfg = qcfg();

    const WwContext closed(src, geom, BarrierProfile::none(), cfg,
                           AmplitudeMode::no_barrier_closed);
    const WwContext numeric(src, geom, BarrierProfile::none(), cfg, AmplitudeMode::numeric,
                            90.0);

    // support: below the retarded cone the closed kernel vanishes
    CHECK(std::abs(closed.commutator_kernel(42.0, 3.0)) == 0.0); // t - t1 = 39 < z
    // Eq-style value inside the cone: (1/4pi z) e^{-i pole (t - z)}
    {
        const double t = 45.0, t1 = 1.0;
        const Complex expect =
            1.0 / (4.0 * M_PI * geom.z) * std::exp(-I * src.pole() * (t - geom.z));
        CHECK(std::abs(closed.commutator_kernel(t, t1) - expect) < 1e-15);
        CHECK(std::abs(numeric.commutator_kernel(t, t1) - expect) < 1e-3 * std::abs(expect));
    }

    // light-cone restriction is a hard error
    CHECK_THROWS_AS(closed.commutator_kernel(40.5, 0.0), light_cone_error);
    CHECK_THROWS_AS(numeric.commutator_kernel(40.5, 0.0), light_cone_error);
    CHECK_THROWS_AS(numeric.commutator_kernel(45.0, 46.0), std::invalid_argument);

    // I1 suppression relative to the pole-carrying I2 (free case)
    {
        const double t = 45.0, t1 = 2.0;
        const double ratio = std::abs(numeric.i_term(1, t, t1)) /
                             std::abs(numeric.i_term(2, t, t1));
        CHECK(ratio < 10.0 / (src.omega * geom.z));
    }

    // kernel identity: sum of I_j equals 8 pi^2 K
    {
        const double t = 47.0, t1 = 3.0;
        Complex sum(0.0);
        for (int j = 1; j <= 4; ++j) sum += numeric.i_term(j, t, t1);
        const Complex k = numeric.commutator_kernel(t, t1);
        CHECK(std::abs(sum / (8.0 * M_PI * M_PI) - k) < 1e-10 * std::abs(k) + 1e-18);
    }
}

TEST_CASE("single-time amplitude")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const QuadratureConfig cfg = qcfg();
    const WwContext closed(src, geom, BarrierProfile::none(), cfg,
                           AmplitudeMode::no_barrier_closed);

    // resonance peak in omega at fixed t2
    {
        const double t2 = 60.0;
        const double peak = std::abs(closed.single_time_amplitude(src.omega, t2));
        for (double om : {src.omega - 3.0, src.omega - 0.7, src.omega + 0.7, src.omega + 3.0})
            CHECK(std::abs(closed.single_time_amplitude(om, t2)) < peak);
    }
    // t2 -> z+ limit vanishes
    CHECK(std::abs(closed.single_time_amplitude(20.1, geom.z)) == 0.0);
    CHECK(std::abs(closed.single_time_amplitude(20.1, geom.z + 1e-6)) < 1e-7);

    // numeric pipeline against the closed form at the reference point
    {
        const WwContext numeric(src, geom, BarrierProfile::none(), cfg, AmplitudeMode::numeric,
                                90.0);
        const Complex ref{-0.020811844493031716, -0.016262001792230103};
        CHECK(std::abs(closed.single_time_amplitude(20.1, 60.0) - ref) < 1e-14);
        const Complex got = numeric.single_time_amplitude(20.1, 60.0);
        CHECK(std::abs(got - ref) < 1e-3 * std::abs(ref));
    }
}

TEST_CASE("joint amplitude piecewise structure")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const QuadratureConfig cfg = qcfg();
    const WwContext closed(src, geom, BarrierProfile::none(), cfg,
                           AmplitudeMode::no_barrier_closed);
    const WwContext numeric(src, geom, BarrierProfile::none(), cfg, AmplitudeMode::numeric,
                            120.0);

    const double om = 20.4;

    // detector-first: M = script M(t2), independent of t1
    {
        const Complex a = closed.joint_amplitude(om, 70.0, 55.0);
        const Complex b = closed.joint_amplitude(om, 90.0, 55.0);
        CHECK(std::abs(a - b) == 0.0);
        CHECK(std::abs(a - closed.single_time_amplitude(om, 55.0)) == 0.0);
    }
    // far side of the cone: M = script M(t1 + z)
    {
        const double t1 = 45.0, t2 = 100.0; // t2 - t1 = 55 > z
        const Complex m = closed.joint_amplitude(om, t1, t2);
        CHECK(std::abs(m - closed.single_time_amplitude(om, t1 + geom.z)) == 0.0);
    }

    // numeric vs closed across the cone, away from the smoothing band
    {
        double worst = 0.0;
        const double t1 = 44.0;
        for (int k = 0; k < 20; ++k) {
            const double off = -6.0 + 12.0 * double(k) / 19.0;
            if (std::abs(off) < 10.0 / src.omega) continue;
            const double t2 = t1 + geom.z + off;
            const Complex ref = closed.joint_amplitude(om, t1, t2);
            const Complex got = numeric.joint_amplitude(om, t1, t2);
            worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
        }
        CHECK(worst < 1e-2);
    }
}

TEST_CASE("commutator vs product matrix elements")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const WwContext numeric(src, geom, BarrierProfile::square(1.0, 1.0, 30.0), qcfg(),
                            AmplitudeMode::numeric, 80.0);
    for (double t : {41.5, 47.0, 63.0}) {
        const Complex prod = numeric.product_matrix_element(t);
        const Complex comm = numeric.commutator_kernel(t, 0.0);
        CHECK(std::abs(prod + comm) < 5e-3 * std::max(std::abs(prod), std::abs(comm)));
    }
}

TEST_CASE("mode and parameter validation")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const QuadratureConfig cfg = qcfg();

    CHECK_THROWS_AS(WwContext(src, geom, BarrierProfile::square(1.0, 1.0, 2.0), cfg,
                              AmplitudeMode::no_barrier_closed),
                    std::invalid_argument);
    CHECK_THROWS_AS(WwContext(src, geom, BarrierProfile::none(), cfg,
                              AmplitudeMode::opaque_asymptotic),
                    std::invalid_argument);
    // barely transparent barrier refuses the opaque asymptotic mode
    CHECK_THROWS_AS(WwContext(src, geom, BarrierProfile::square(1.0, 0.1, 21.0), cfg,
                              AmplitudeMode::opaque_asymptotic),
                    not_opaque_error);
    SourceParams bad = src;
    bad.gamma = 30.0;
    CHECK_THROWS_AS(WwContext(bad, geom, BarrierProfile::none(), cfg,
                              AmplitudeMode::no_barrier_closed),
                    std::invalid_argument);
}
