#include "doctest.h"

#include <random>

#include "ptcorr/expint.hpp"
#include "ptcorr/quadrature.hpp"
#include "ptcorr/scattering.hpp"
#include "ptcorr/spline.hpp"

using namespace ptcorr;

namespace {
const Complex I(0.0, 1.0);

QuadratureConfig tight()
{
    QuadratureConfig c;
    c.rel_tol = 1e-10;
    c.abs_tol = 1e-14;
    return c;
}
} // namespace

TEST_CASE("adaptive panels on smooth integrands")
{
    const QuadratureConfig cfg = tight();
    auto r = integrate_adaptive([](double x) { return Complex(x * x, 0.0); }, 0.0, 1.0, cfg);
    CHECK(r.value.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.converged);

    auto e = integrate_adaptive([](double x) { return Complex(std::exp(x), 0.0); }, 0.0, 2.0, cfg);
    CHECK(e.value.real() == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-12));
    CHECK(std::abs(e.value.real() - (std::exp(2.0) - 1.0)) <= 10.0 * e.error_estimate + 1e-13);
}

TEST_CASE("oscillatory finite: analytic antiderivative")
{
    const QuadratureConfig cfg = tight();
    for (double q : {0.5, 5.0, 80.0}) {
        const double w = 2.0;
        const auto r = integrate_oscillatory_finite([](Complex) { return Complex(1.0); }, 0.0, w,
                                                    q, cfg, true);
        const Complex exact = (std::exp(I * q * w) - 1.0) / (I * q);
        CHECK(std::abs(r.value - exact) < 1e-10 * std::abs(exact) + 1e-13);
    }
}

TEST_CASE("oscillatory finite: reduced transmission against its endpoint asymptotics")
{
    // mu=100, D=1 barrier integrated over (0, 20) at phase rate z - D = 39;
    // the first-order endpoint form carries an O(1/(z-D)) error of its own
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-9;
    const double mu = 100.0, D = 1.0, zmD = 39.0, w = 20.0;
    auto f = [&](Complex kz) {
        if (kz == Complex(0.0, 0.0)) return Complex(0.0);
        return square_barrier_transmission(mu, D, kz) * std::exp(I * kz * D);
    };
    const auto r = integrate_oscillatory_finite(f, 0.0, w, zmD, cfg, true);
    CHECK(r.method == QuadratureMethod::contour_rotated);
    const Complex asym = std::exp(I * Complex(w) * zmD) * f(Complex(w, 0.0)) / (I * zmD);
    CHECK(std::abs(r.value - asym) < 1e-2 * std::abs(asym));

    // direct and rotated paths agree far better than that
    QuadratureConfig direct_cfg = cfg;
    direct_cfg.rotation_threshold = 1e300;
    const auto rd = integrate_oscillatory_finite(f, 0.0, w, zmD, direct_cfg, true);
    CHECK(rd.method == QuadratureMethod::direct_adaptive);
    CHECK(std::abs(rd.value - r.value) <=
          10.0 * (rd.error_estimate + r.error_estimate) + 1e-12 * std::abs(r.value));
}

TEST_CASE("oscillatory finite: interior inverse-sqrt singularity")
{
    // oracle: int_0^1 |x-c|^{-1/2} e^{iqx} dx via the smooth substitution
    // x = c -/+ u^2 on each side
    const double c = 0.3, q = 5.0;
    const QuadratureConfig ocfg = tight();
    auto left = integrate_adaptive(
        [&](double u) { return 2.0 * std::exp(I * q * (c - u * u)); }, 0.0, std::sqrt(c), ocfg);
    auto right = integrate_adaptive(
        [&](double u) { return 2.0 * std::exp(I * q * (c + u * u)); }, 0.0, std::sqrt(1.0 - c),
        ocfg);
    const Complex exact = left.value + right.value;

    auto f = [&](Complex x) { return 1.0 / std::sqrt(std::abs(x.real() - c)); };
    const double splits[1] = {c};

    double prev_err = -1.0;
    for (double rel : {1e-4, 1e-6, 1e-8}) {
        QuadratureConfig cfg;
        cfg.rel_tol = rel;
        cfg.abs_tol = 1e-14;
        cfg.max_subdivisions = 4000;
        const auto r = integrate_oscillatory_finite(f, 0.0, 1.0, q, cfg, false, splits);
        CHECK(std::abs(r.value - exact) < 1e-3 * std::abs(exact));
        if (prev_err >= 0.0) CHECK(r.error_estimate <= prev_err * 1.01);
        prev_err = r.error_estimate;
    }
}

TEST_CASE("non-convergence is reported, not hidden")
{
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-16;
    cfg.max_subdivisions = 3;
    auto f = [](Complex x) { return 1.0 / std::sqrt(std::abs(x.real() - 0.37)); };
    const double splits[1] = {0.37};
    const auto r = integrate_oscillatory_finite(f, 0.0, 1.0, 3.0, cfg, false, splits);
    CHECK(!r.converged);
}

TEST_CASE("pole subtraction: trivial and closed-form cases")
{
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;

    const Complex p(1.0, -0.01);
    const auto zero = integrate_pole_semiinfinite([](double) { return Complex(0.0); }, p, cfg);
    CHECK(std::abs(zero.value) < 1e-14);

    // f == 1 reduces to the closed log over the truncated band
    const double W = cfg.omega_cut(p);
    const auto one = integrate_pole_semiinfinite([](double) { return Complex(1.0); }, p, cfg);
    const Complex exact = std::log((Complex(W) - p) / (-p));
    CHECK(std::abs(one.value - exact) < 1e-10 * std::abs(exact));
    CHECK(one.method == QuadratureMethod::pole_subtracted);

    CHECK_THROWS_AS(
        integrate_pole_semiinfinite([](double) { return Complex(1.0); }, Complex(1.0, 0.5), cfg),
        std::invalid_argument);
}

TEST_CASE("pole subtraction: oscillatory residue regime")
{
    // f = e^{-i w s} against the pole at 20 - 0.025i; truncated reference
    // value computed independently at W = 120 (K = 2000)
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-12;
    cfg.max_subdivisions = 20000;
    const Complex p(20.0, -0.025);
    const double s = 30.0;
    const auto r = integrate_pole_semiinfinite(
        [&](double w) { return std::exp(-I * Complex(w) * s); }, p, cfg, s);
    const Complex exact{-0.13121872393185327, 2.9670566377148249};
    CHECK(std::abs(r.value - exact) < 1e-7 * std::abs(exact));

    // dominated by the residue of the closed contour
    const Complex residue = -2.0 * M_PI * I * std::exp(-I * p * s);
    CHECK(std::abs(r.value - residue) < 0.01 * std::abs(residue));

    // residue dominance improves with s while the pole damping is mild
    const auto r10 = integrate_pole_semiinfinite(
        [&](double w) { return std::exp(-I * Complex(w) * 10.0); }, p, cfg, 10.0);
    const Complex res10 = -2.0 * M_PI * I * std::exp(-I * p * 10.0);
    CHECK(std::abs(r.value - residue) / std::abs(residue) <
          std::abs(r10.value - res10) / std::abs(res10));
}

TEST_CASE("complex exponential integral")
{
    struct Ref {
        Complex z, e1;
    };
    const Ref refs[] = {
        {{3.0, 4.0}, {0.00086395395897958507, 0.0087862083771974419}},
        {{0.1, -0.2}, {1.0275473087791882, 0.91723547164636621}},
        {{0.0, 50.0}, {0.0056283863241163058, -0.019179254308960725}},
        {{0.5, 0.0}, {0.55977359477616084, 0.0}},
        {{0.0, -7.0}, {-0.07669527848218452, 0.11619971254680303}},
        {{-0.5, -10.0}, {0.082186940551087551, -0.14097835590378763}},
        {{-3.125, 2500.0}, {0.0059128486729434675, -0.0069224407627203549}},
        {{0.75, 40.0}, {-0.0091200345030268918, 0.007472885481650802}},
    };
    for (const auto& r : refs)
        CHECK(std::abs(expint_e1(r.z) - r.e1) < 1e-12 * (1.0 + std::abs(r.e1)));
}

TEST_CASE("Fourier-pole segment closed form")
{
    struct Ref {
        Complex p;
        double q, W;
        Complex val;
    };
    const Ref refs[] = {
        {{20.0, -0.025}, 39.0, 120.0, {-1.834399673418077, -1.4994102379838379}},
        {{20.0, -0.025}, -39.0, 120.0, {-0.00020877765172933101, -0.0014262355807768839}},
        {{20.0, -0.025}, 0.0, 120.0, {1.6094371624347097, -3.1400926542460428}},
        {{5.0, -1.0}, 3.0, 50.0, {-0.21729970090020859, 0.30813045292121954}},
        {{20.0, -0.025}, 1.0, 25.0, {-5.6498701799067881, -2.2685814959732675}},
        {{20.0, -0.025}, 140.0, 120.0, {0.14133730803014824, 0.12688842273559361}},
    };
    for (const auto& r : refs) {
        const Complex got = fourier_pole_segment(r.p, r.q, r.W);
        CHECK(std::abs(got - r.val) < 1e-10 * (1.0 + std::abs(r.val)));
    }

    // brute-force panels as an independent oracle on random parameters
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    QuadratureConfig cfg = tight();
    cfg.max_subdivisions = 40000;
    for (int k = 0; k < 12; ++k) {
        const Complex p(2.0 + 28.0 * u01(rng), -(0.01 + 1.5 * u01(rng)));
        const double q = (u01(rng) - 0.4) * 60.0;
        const double W = p.real() + 5.0 + 80.0 * u01(rng);
        const Complex got = fourier_pole_segment(p, q, W);
        const double splits[1] = {p.real()};
        const auto brute = integrate_adaptive(
            [&](double w) { return std::exp(-I * Complex(w) * q) / (Complex(w) - p); }, 0.0, W,
            cfg, splits);
        CHECK(std::abs(got - brute.value) <
              1e-7 * (1.0 + std::abs(brute.value)) + 10.0 * brute.error_estimate);
    }
}

TEST_CASE("complex cubic spline and its Fourier integrals")
{
    // tabulate a smooth complex function and integrate it against e^{i w t}
    const size_t n = 400;
    std::vector<double> x(n);
    std::vector<Complex> y(n);
    for (size_t i = 0; i < n; ++i) {
        x[i] = 10.0 * double(i) / double(n - 1);
        y[i] = std::exp(Complex(-0.3 * x[i], 1.7 * x[i]));
    }
    const CubicSpline s(x, y);

    CHECK(std::abs(s.value(3.777) - std::exp(Complex(-0.3 * 3.777, 1.7 * 3.777))) < 1e-6);

    for (double om : {0.0, 0.37, 12.0, 55.0}) {
        const Complex rate(-0.3, 1.7 + om);
        const Complex exact = (std::exp(rate * 8.5) - std::exp(rate * 1.25)) / rate;
        const Complex got = s.fourier_integral(om, 1.25, 8.5);
        CHECK(std::abs(got - exact) < 2e-6 * (1.0 + std::abs(exact)));
    }

    // moment branches agree where they meet
    Complex lo[4], hi[4];
    fourier_moments(0.99 / 0.01, 0.01, lo); // |wh| just below 1, series
    fourier_moments(1.01 / 0.01, 0.01, hi); // just above, recursion
    for (int k = 0; k < 4; ++k) {
        CHECK(std::isfinite(lo[k].real()));
        CHECK(std::isfinite(hi[k].real()));
    }
    Complex a[4], b[4];
    fourier_moments(99.0, 0.0100999, a);
    fourier_moments(99.0, 0.0101001, b);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-12);
}

TEST_CASE("panel diagnostics dump")
{
    QuadratureConfig cfg;
    std::vector<PanelDiag> diag;
    integrate_adaptive([](double x) { return Complex(std::sin(20.0 * x), 0.0); }, 0.0, 3.0, cfg,
                       {}, &diag);
    CHECK(diag.size() >= 2);
    const std::string path = "/tmp/ptcorr_panels_test.csv";
    write_panel_csv(path, diag);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp);
    char line[128];
    REQUIRE(std::fgets(line, sizeof line, fp));
    CHECK(std::string(line) == "# ptcorr quadrature panels v1\n");
    std::fclose(fp);
    std::remove(path.c_str());
}
