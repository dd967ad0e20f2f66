#include "doctest.h"

#include "ptcorr/correlation.hpp"

using namespace ptcorr;

namespace {

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

TEST_CASE("closed-form joint probability")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const WwContext ctx(src, geom, BarrierProfile::none(), qcfg(),
                        AmplitudeMode::no_barrier_closed);
    const double sat = p_saturation(ctx);
    CHECK(sat == doctest::Approx(1.0 / (8.0 * M_PI * 1600.0 * 0.05)));

    // near the light-cone edge with t1 large: only the t2 branch survives
    {
        const double t2 = geom.z + 1.0;
        const double p = p_joint(ctx, 1e6, t2).value;
        CHECK(p == doctest::Approx(sat * (1.0 - std::exp(-src.gamma * 1.0))).epsilon(1e-12));
    }
    // saturation when both clicks are late
    CHECK(p_joint(ctx, 4000.0, 8000.0).value == doctest::Approx(sat).epsilon(1e-12));

    // monotone in both arguments on a closed grid
    const CorrelationGrid g = fill_grid_serial(ctx, GridAxis{42.0, 50.0, 1.0},
                                               GridAxis{82.0, 95.0, 1.0});
    for (size_t i = 1; i < g.n1(); ++i)
        for (size_t j = 1; j < g.n2(); ++j) {
            CHECK(g.p(i, j) >= g.p(i - 1, j) - 1e-15);
            CHECK(g.p(i, j) >= g.p(i, j - 1) - 1e-15);
        }
}

TEST_CASE("single click rate")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const WwContext ctx(src, geom, BarrierProfile::none(), qcfg(),
                        AmplitudeMode::no_barrier_closed);
    const double sat = p_saturation(ctx);

    CHECK(single_click_rate(ctx, geom.z).value == doctest::Approx(0.0));
    const double half_t = geom.z + std::log(2.0) / src.gamma;
    CHECK(single_click_rate(ctx, half_t).value == doctest::Approx(0.5 * sat).epsilon(1e-12));

    // frequency quadrature of the closed amplitude reproduces the rate formula
    {
        const double t2 = geom.z + 10.0;
        QuadratureConfig c;
        c.rel_tol = 1e-7;
        c.abs_tol = 1e-16;
        c.max_subdivisions = 60000;
        const double V = 1e4;
        const double splits[5] = {src.omega - 50.0 * src.gamma, src.omega - src.gamma, src.omega,
                                  src.omega + src.gamma, src.omega + 50.0 * src.gamma};
        const auto r = integrate_adaptive(
            [&](double w) {
                return Complex(std::norm(ctx.single_time_amplitude(w, t2)), 0.0);
            },
            src.omega - V, src.omega + V, c, splits);
        const double expect = sat * (1.0 - std::exp(-src.gamma * (t2 - geom.z)));
        CHECK(r.value.real() == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("numeric joint probability matches the closed chain pointwise")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    QuadratureConfig c = qcfg();
    c.rel_tol = 1e-5;
    const WwContext closed(src, geom, BarrierProfile::none(), c,
                           AmplitudeMode::no_barrier_closed);
    const WwContext numeric(src, geom, BarrierProfile::none(), c, AmplitudeMode::numeric, 96.0);

    const double t1 = 50.0, t2 = 95.0;
    const double ref = p_joint(closed, t1, t2).value;
    const PointResult got = p_joint(numeric, t1, t2);
    CHECK(std::abs(got.value - ref) < 1e-2 * ref);
}

TEST_CASE("grid fill: serial and parallel agree bitwise")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    {
        const WwContext ctx(src, geom, BarrierProfile::none(), qcfg(),
                            AmplitudeMode::no_barrier_closed);
        const GridAxis t1{42.0, 56.0, 0.5};
        const GridAxis t2{82.0, 100.0, 0.5};
        const CorrelationGrid a = fill_grid_serial(ctx, t1, t2);
        const CorrelationGrid b = fill_grid_parallel(ctx, t1, t2);
        REQUIRE(a.p_values.size() == b.p_values.size());
        for (size_t k = 0; k < a.p_values.size(); ++k) CHECK(a.p_values[k] == b.p_values[k]);
    }
    {
        QuadratureConfig c = qcfg();
        c.rel_tol = 3e-3;
        const WwContext ctx(src, geom, BarrierProfile::none(), c, AmplitudeMode::numeric, 92.0);
        const GridAxis t1{44.0, 46.0, 1.0};
        const GridAxis t2{86.0, 89.0, 1.0};
        const CorrelationGrid a = fill_grid_serial(ctx, t1, t2);
        const CorrelationGrid b = fill_grid_parallel(ctx, t1, t2);
        for (size_t k = 0; k < a.p_values.size(); ++k) CHECK(a.p_values[k] == b.p_values[k]);
    }
}

TEST_CASE("delta line extraction on closed grids")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const double h = 10.0 / src.omega;

    // free propagation: ridge at z, weight (norm / 8 pi z^2) e^{-Gamma t1}
    {
        const WwContext ctx(src, geom, BarrierProfile::none(), qcfg(),
                            AmplitudeMode::no_barrier_closed);
        const CorrelationGrid g = fill_grid_serial(ctx, GridAxis{42.0, 57.0, h},
                                                   GridAxis{82.0, 101.5, h});
        const DeltaLine line = extract_delta_line(g, 10.0 / src.omega);
        CHECK(line.found);
        CHECK(std::abs(line.delay - geom.z) <= h + 1e-9);
        CHECK(line.fit_gamma == doctest::Approx(src.gamma).epsilon(0.01));
        const double amp_ref = src.norm / (8.0 * M_PI * geom.z * geom.z);
        CHECK(line.fit_amplitude == doctest::Approx(amp_ref).epsilon(0.02));

        // w integrates across the band to the jump weight within 2%
        const size_t j = g.n2() / 2;
        const long dstar = std::lround((line.delay - (g.t2_axis[0] - g.t1_axis[0])) / h);
        double band = 0.0;
        for (long m = -3; m <= 3; ++m) {
            const long i = long(j) - dstar + m;
            if (i >= 0 && i < long(g.n1())) band += g.w(size_t(i), j) * h;
        }
        const double expect = amp_ref * std::exp(-src.gamma * (g.t2_axis[j] - line.delay));
        CHECK(band == doctest::Approx(expect).epsilon(0.02));

        const TunnelingObservables obs = tunneling_observables(line, geom, BarrierProfile::none());
        CHECK(std::abs(obs.clock_tunneling_time) <= h + 1e-9);
        CHECK(std::abs(obs.barrier_traversal_time) <= h + 1e-9);
    }

    // opaque barrier: ridge moves to z - D and the weight carries |scriptT|^2
    {
        const BarrierProfile barrier = BarrierProfile::square(1.0, 1.0, 100.0);
        const WwContext ctx(src, geom, barrier, qcfg(), AmplitudeMode::opaque_asymptotic);
        const CorrelationGrid g = fill_grid_serial(ctx, GridAxis{42.0, 57.0, h},
                                                   GridAxis{82.0, 101.5, h});
        const DeltaLine line = extract_delta_line(g, 10.0 / src.omega);
        const double zd = geom.z - barrier.width();
        CHECK(std::abs(line.delay - zd) <= h + 1e-9);
        const double amp_ref =
            src.norm * std::norm(ctx.transmission_factor()) / (8.0 * M_PI * zd * zd);
        CHECK(line.fit_amplitude == doctest::Approx(amp_ref).epsilon(0.02));

        const TunnelingObservables obs = tunneling_observables(line, geom, barrier);
        CHECK(std::abs(obs.barrier_traversal_time) <= h + 1e-9);
        CHECK(obs.clock_tunneling_time == doctest::Approx(-barrier.width()).epsilon(0.05));
    }

    // an empty grid refuses to invent a ridge
    {
        CorrelationGrid flat;
        flat.t1_axis = GridAxis{0.0, 10.0, 1.0}.values();
        flat.t2_axis = GridAxis{5.0, 15.0, 1.0}.values();
        flat.p_values.assign(flat.n1() * flat.n2(), 0.0);
        flat.differentiate();
        CHECK_THROWS_AS(extract_delta_line(flat, 1.0), no_concentration_error);
    }
}

TEST_CASE("smoothed closed grids stay consistent")
{
    const SourceParams src = default_src();
    const Geometry geom = default_geom();
    const double eps = 5.0 / src.omega;
    const WwContext ctx(src, geom, BarrierProfile::none(), qcfg(),
                        AmplitudeMode::no_barrier_closed, 0.0, eps);
    const double h = 10.0 / src.omega;
    const CorrelationGrid g = fill_grid_serial(ctx, GridAxis{42.0, 57.0, h},
                                               GridAxis{82.0, 101.5, h});
    const DeltaLine line = extract_delta_line(g, 10.0 / src.omega);
    CHECK(std::abs(line.delay - geom.z) <= h + 1e-9);
    CHECK(line.fit_gamma == doctest::Approx(src.gamma).epsilon(0.02));
}
