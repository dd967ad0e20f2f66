#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "ptcorr/commands.hpp"
#include "ptcorr/expint.hpp"

#include "json.hpp"

namespace ptcorr {

using ordered_json = nlohmann::ordered_json;

namespace {

const Complex I(0.0, 1.0);

struct CorpusEntry {
    std::string name;
    // evaluates with the given tolerances; fills est_err; returns value
    std::function<Complex(const QuadratureConfig&, double&)> run;
    Complex exact;
    bool rotatable = false; // oscillatory entry where both methods apply
    std::function<Complex(Complex)> f; // integrand for rotatable entries
    double lo = 0.0, hi = 0.0, rate = 0.0;
};

Complex exact_poly_osc(double q, double a, double b, int k)
{
    // int x^k e^{iqx} dx by parts
    const Complex iq(0.0, q);
    auto F = [&](double x) {
        Complex s(0.0);
        Complex c(1.0);
        double xk = std::pow(x, k);
        double fact = 1.0;
        // antiderivative: e^{iqx} sum_{m=0..k} (-1)^m k!/(k-m)! x^{k-m}/(iq)^{m+1}
        Complex acc(0.0);
        for (int m = 0; m <= k; ++m) {
            acc += fact * std::pow(x, k - m) / std::pow(iq, m + 1) * ((m % 2) ? -1.0 : 1.0);
            fact *= double(k - m);
        }
        (void)c;
        (void)xk;
        (void)s;
        return std::exp(iq * x) * acc;
    };
    return F(b) - F(a);
}

std::vector<CorpusEntry> build_corpus()
{
    std::vector<CorpusEntry> out;
    auto osc = [&](std::string name, std::function<Complex(Complex)> f, double lo, double hi,
                   double rate, Complex exact, bool rotatable) {
        CorpusEntry e;
        e.name = std::move(name);
        e.exact = exact;
        e.rotatable = rotatable;
        e.f = f;
        e.lo = lo;
        e.hi = hi;
        e.rate = rate;
        e.run = [f, lo, hi, rate](const QuadratureConfig& cfg, double& err) {
            const IntegralResult r = integrate_oscillatory_finite(f, lo, hi, rate, cfg, false);
            err = r.error_estimate;
            return r.value;
        };
        out.push_back(std::move(e));
    };
    auto pole = [&](std::string name, std::function<Complex(double)> f, Complex p, double rate,
                    Complex exact) {
        CorpusEntry e;
        e.name = std::move(name);
        e.exact = exact;
        e.run = [f, p, rate](const QuadratureConfig& cfg, double& err) {
            QuadratureConfig c = cfg;
            c.omega_cut_k = 2000.0; // expected values pin the default truncation
            const IntegralResult r = integrate_pole_semiinfinite(f, p, c, rate);
            err = r.error_estimate;
            return r.value;
        };
        out.push_back(std::move(e));
    };

    const auto one = [](Complex) { return Complex(1.0); };

    osc("const q=5", one, 0.0, 1.0, 5.0,
        (std::exp(I * 5.0) - 1.0) / (I * 5.0), true);
    osc("const q=100", one, 0.0, 2.0, 100.0,
        (std::exp(I * 200.0) - 1.0) / (I * 100.0), true);
    osc("x q=30", [](Complex x) { return x; }, 0.0, 2.0, 30.0,
        exact_poly_osc(30.0, 0.0, 2.0, 1), true);
    osc("x^2 q=60", [](Complex x) { return x * x; }, 0.0, 1.0, 60.0,
        exact_poly_osc(60.0, 0.0, 1.0, 2), true);
    osc("exp(-x) q=40", [](Complex x) { return std::exp(-x); }, 0.0, 3.0, 40.0,
        (std::exp((I * 40.0 - 1.0) * 3.0) - 1.0) / (I * 40.0 - 1.0), true);
    osc("cos2x q=25", [](Complex x) { return std::cos(2.0 * x); }, 0.0, M_PI, 25.0,
        0.5 * ((std::exp(I * 27.0 * M_PI) - 1.0) / (I * 27.0) +
               (std::exp(I * 23.0 * M_PI) - 1.0) / (I * 23.0)),
        true);
    osc("1/sqrt(x) q=10",
        [](Complex x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 10.0,
        Complex{0.34636623238443648, 0.48228640688120739}, false);
    osc("sin(x) q=7", [](Complex x) { return std::sin(x); }, 0.0, 2.0, 7.0,
        ((std::exp(I * 8.0 * 2.0) - 1.0) / (I * 8.0) - (std::exp(I * 6.0 * 2.0) - 1.0) / (I * 6.0)) /
            (2.0 * I),
        true);
    osc("const q=1e-3", one, 0.0, 1.0, 1e-3,
        (std::exp(I * 1e-3) - 1.0) / (I * 1e-3), false);
    osc("1/(1+x) q=12", [](Complex x) { return 1.0 / (1.0 + x); }, 0.0, 4.0, 12.0,
        Complex{-0.0059325334719632396, 0.093133577349610377}, true);
    osc("e^{ix} q=9", [](Complex x) { return std::exp(I * x); }, 0.0, 2.5, 9.0,
        (std::exp(I * 10.0 * 2.5) - 1.0) / (I * 10.0), true);
    osc("x^3 q=45", [](Complex x) { return x * x * x; }, 0.0, 1.5, 45.0,
        exact_poly_osc(45.0, 0.0, 1.5, 3), true);

    // truncated identity: f == 1 gives the closed log over [0, W]
    {
        const Complex p(1.0, -0.01);
        QuadratureConfig probe;
        const double W = probe.omega_cut(p);
        pole("pole const", [](double) { return Complex(1.0); }, p, 0.0,
             std::log((Complex(W) - p) / (-p)));
    }
    pole("pole exp decay", [](double w) { return Complex(std::exp(-w)); }, Complex(2.0, -0.3),
         0.0, Complex{-0.54818070531483831, -0.45877739078855201});
    pole("pole osc s=3", [](double w) { return std::exp(-I * 3.0 * w); }, Complex(5.0, -0.5),
         3.0, Complex{-0.91375847473837002, 1.1312943073149686});
    pole("pole cos decay",
         [](double w) { return std::exp(-w / 5.0) * std::cos(3.0 * w); }, Complex(4.0, -0.2),
         0.0, Complex{0.44274002005766322, -0.63620606854544326});
    pole("pole osc s=30", [](double w) { return std::exp(-I * 30.0 * w); },
         Complex(20.0, -0.025), 30.0, Complex{-0.13121872393185327, 2.9670566377148249});
    pole("pole zero", [](double) { return Complex(0.0); }, Complex(3.0, -0.1), 0.0,
         Complex(0.0));
    osc("lorentz q=18", [](Complex x) { return 1.0 / (1.0 + x * x); }, 0.0, 2.0, 18.0,
        Complex{-0.010927064066597631, 0.057818253617630626}, false);
    osc("gauss q=22", [](Complex x) { return std::exp(-x * x); }, 0.0, 2.0, 22.0,
        Complex{-0.00013390074756794758, 0.044833531000809723}, false);

    return out;
}

double rel_gap(Complex got, Complex want)
{
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

std::string fmtg(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace

ValidateReport run_validation_suites(const std::optional<RunConfig>& cfg_opt,
                                     const CommandOptions& opt)
{
    ValidateReport report;
    report.seed = opt.seed;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        report.suites.push_back(SuiteResult{name, pass, detail});
        if (!pass) ++report.failed;
    };

    SourceParams src;
    Geometry geom;
    QuadratureConfig qcfg;
    if (cfg_opt) {
        src = cfg_opt->source;
        geom = cfg_opt->geometry;
        qcfg = cfg_opt->quadrature;
    }

    // ---- scattering property suites -------------------------------------
    {
        double max_unit = 0.0, max_rec = 0.0, max_b1 = 0.0;
        for (int k = 0; k < 500; ++k) {
            const BarrierProfile prof = random_profile(rng);
            const double kmax = 3.0 * std::max(prof.max_cutoff(), 1.0);
            const double kz = 0.02 + (kmax - 0.02) * u01(rng);
            const ScatteringCoefficients sc = scattering_coefficients(prof, Complex(kz, 0.0));
            max_unit = std::max(max_unit, sc.unitarity_residual());
            const ScatteringCoefficients rev =
                scattering_coefficients(prof.reversed(), Complex(kz, 0.0));
            max_rec = std::max(max_rec, std::abs(sc.T - rev.T));

            const Complex t1 = sc.T * std::conj(sc.R) * std::exp(-2.0 * I * Complex(kz) * prof.a);
            Complex t2 = std::conj(sc.T) * sc.Rprime * std::exp(-2.0 * I * Complex(kz) * prof.b());
            if (opt.inject_fault == "b1-sign") t2 = -t2;
            max_b1 = std::max(max_b1, std::abs(t1 + t2));
        }
        add("unitarity", max_unit < 1e-10, "max | |T|^2+|R|^2-1 | = " + fmtg(max_unit));
        add("reciprocity", max_rec < 1e-12, "max |T - T'| = " + fmtg(max_rec));
        add("B1 residual", max_b1 < 1e-10, "max residual = " + fmtg(max_b1));
    }
    {
        // closed-form equivalence against the rectangular-barrier formula
        const double mu = 2.0, D = 1.0;
        const BarrierProfile prof = BarrierProfile::square(1.0, D, mu);
        double worst = 0.0, worst_band = 0.0;
        for (int k = 0; k < 1000; ++k) {
            double kz;
            if (k % 5 == 4)
                kz = mu + (u01(rng) - 0.5) * 2e-3; // series band
            else
                kz = 0.05 + 8.0 * u01(rng);
            if (std::abs(kz - mu) < 1e-12) continue;
            const Complex ref = square_barrier_transmission(mu, D, Complex(kz, 0.0));
            const Complex got = scattering_coefficients(prof, Complex(kz, 0.0)).T;
            const double gap = std::abs(got - ref) / std::abs(ref);
            if (std::abs(kz - mu) < 1e-3)
                worst_band = std::max(worst_band, gap);
            else
                worst = std::max(worst, gap);
        }
        add("square-barrier oracle", worst < 1e-10 && worst_band < 1e-6,
            "rel gap " + fmtg(worst) + " (threshold band " + fmtg(worst_band) + ")");
    }
    {
        const double mu = 100.0, D = 1.0;
        double worst = 0.0;
        for (double kz = 2.0; kz < 90.0; kz += 3.7) {
            const Complex asym = opaque_transmission_asymptotic(mu, D, Complex(kz, 0.0));
            const Complex exact =
                square_barrier_transmission(mu, D, Complex(kz, 0.0)) * std::exp(I * Complex(kz) * D);
            worst = std::max(worst, rel_gap(asym, exact));
        }
        add("opaque asymptotic", worst < 1e-6, "max rel gap = " + fmtg(worst));
    }
    {
        const double mu = 2.0, D = 1.0;
        const BarrierProfile prof = BarrierProfile::square(1.0, D, mu);
        double worst = 0.0;
        for (double e : {1e-3, 1e-5, 1e-7}) {
            const Complex lo = scattering_coefficients(prof, Complex(mu - e, 0.0)).T;
            const Complex hi = scattering_coefficients(prof, Complex(mu + e, 0.0)).T;
            worst = std::max(worst, std::abs(hi - lo) / (e * std::abs(lo)));
        }
        add("branch continuity", worst < 100.0,
            "|T(mu+e)-T(mu-e)|/(e |T|) <= " + fmtg(worst));
    }

    // ---- quadrature corpus ----------------------------------------------
    {
        const auto corpus = build_corpus();
        int honest = 0, total = 0;
        double worst_gap = 0.0;
        for (const auto& e : corpus) {
            double est = 0.0;
            const Complex got = e.run(qcfg, est);
            const double err_true = std::abs(got - e.exact);
            ++total;
            if (err_true <= 10.0 * est + 1e-14 * (1.0 + std::abs(e.exact))) ++honest;
            worst_gap = std::max(worst_gap, rel_gap(got, e.exact));
        }
        add("quadrature honesty",
            honest >= (total * 95 + 99) / 100,
            std::to_string(honest) + "/" + std::to_string(total) + " within 10x estimate");

        double worst_eq = 0.0;
        for (const auto& e : corpus) {
            if (!e.rotatable) continue;
            QuadratureConfig direct_cfg = qcfg;
            direct_cfg.rotation_threshold = 1e300;
            QuadratureConfig rot_cfg = qcfg;
            rot_cfg.rotation_threshold = 0.0;
            const IntegralResult rd =
                integrate_oscillatory_finite(e.f, e.lo, e.hi, e.rate, direct_cfg, true);
            const IntegralResult rr =
                integrate_oscillatory_finite(e.f, e.lo, e.hi, e.rate, rot_cfg, true);
            const double gap = std::abs(rd.value - rr.value);
            const double budget = 10.0 * (rd.error_estimate + rr.error_estimate) + 1e-12;
            worst_eq = std::max(worst_eq, gap / budget);
        }
        add("quadrature method equivalence", worst_eq <= 1.0,
            "max gap/budget = " + fmtg(worst_eq));

        bool mono = true;
        std::string detail;
        for (const auto& e : corpus) {
            double prev = -1.0;
            for (double rt : {1e-4, 1e-6, 1e-8, 1e-10}) {
                QuadratureConfig c = qcfg;
                c.rel_tol = rt;
                c.abs_tol = std::min(qcfg.abs_tol, rt);
                double est = 0.0;
                const Complex got = e.run(c, est);
                const double err_true = std::abs(got - e.exact);
                if (prev >= 0.0 && err_true > prev + 1e-13 * (1.0 + std::abs(e.exact))) {
                    mono = false;
                    detail = e.name + " at rel_tol " + fmtg(rt);
                }
                prev = err_true;
            }
        }
        add("quadrature tolerance monotonicity", mono, mono ? "non-increasing" : detail);
    }

    // ---- mode overlap property -------------------------------------------
    {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const BarrierProfile prof = random_profile(rng);
            const double kz = 0.05 + 3.0 * std::max(prof.max_cutoff(), 1.0) * u01(rng);
            const double z = prof.b() + 1.0 + 20.0 * u01(rng);
            const ModeOverlap ov = summed_mode_overlap(kz, z, prof);
            worst = std::max(worst, ov.mismatch() / std::max(1.0, std::abs(ov.reduced)));
        }
        add("mode overlap identity", worst < 1e-11, "max mismatch = " + fmtg(worst));
    }

    // ---- WW chain ----------------------------------------------------------
    const double t_hor = geom.z + 30.0;
    const WwContext free_closed(src, geom, BarrierProfile::none(), qcfg,
                                AmplitudeMode::no_barrier_closed);
    const WwContext free_num(src, geom, BarrierProfile::none(), qcfg, AmplitudeMode::numeric,
                             t_hor);
    {
        // t1 must drop out when the detector clicked first
        const double t2 = geom.z + 5.0;
        double worst = 0.0;
        for (const WwContext* ctx : {&free_closed, &free_num}) {
            const Complex ref = ctx->joint_amplitude(src.omega + 0.3, t2 + 2.0, t2);
            for (double t1 : {t2 + 1.0, t2 + 7.0, t2 + 19.0})
                worst = std::max(worst,
                                 std::abs(ctx->joint_amplitude(src.omega + 0.3, t1, t2) - ref));
        }
        add("t1 independence", worst < 1e-15, "max |M(t1a)-M(t1b)| = " + fmtg(worst));
    }
    {
        // commutator vs product forms of the matrix element
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double t = geom.z + 1.5 + 22.0 * u01(rng);
            const Complex prod = free_num.product_matrix_element(t);
            const Complex comm = free_num.commutator_kernel(t, 0.0);
            worst = std::max(worst, std::abs(prod + comm) /
                                        std::max({std::abs(prod), std::abs(comm), 1e-300}));
        }
        add("commutator-product identity", worst < 5e-3, "max rel gap = " + fmtg(worst));
    }
    {
        // closed kernel support is exactly the retarded cone
        double worst = 0.0;
        for (double t1 = 1.5; t1 < geom.z - 1.0; t1 += 2.3) {
            const double t = geom.z + 1.0 + 0.9 * t1; // keeps t - t1 < z
            if (t - t1 >= geom.z) continue;
            worst = std::max(worst, std::abs(free_closed.commutator_kernel(t, t1)));
        }
        add("kernel support (closed)", worst == 0.0, "max |K| below cone = " + fmtg(worst));

        // numeric residual below the cone, reported for reference
        const double peak = std::abs(free_num.commutator_kernel(geom.z + 4.0, 3.0));
        double worst_num = 0.0;
        for (double d = 1.0; d < 30.0; d += 1.7) {
            const double t = geom.z + 1.2;
            const double t1 = t - (geom.z - d);
            worst_num = std::max(worst_num, std::abs(free_num.commutator_kernel(t, t1)) / peak);
        }
        add("kernel support (numeric, informational)", true,
            "max |K|/peak below cone = " + fmtg(worst_num));
    }
    {
        // opaque factorization of the kernel spectral terms
        const BarrierProfile barrier = BarrierProfile::square(1.0, 1.0, 5.0 * src.omega);
        Geometry g2 = geom;
        QuadratureConfig q2 = qcfg;
        q2.omega_cut_k = 100.0;
        const WwContext opq(src, g2, barrier, q2, AmplitudeMode::numeric, t_hor);
        Geometry gref = g2;
        gref.z = g2.z - barrier.width();
        const WwContext ref(src, gref, BarrierProfile::none(), q2, AmplitudeMode::numeric,
                            t_hor);
        const Complex st = opq.transmission_factor();
        const Complex stc = std::conj(reduced_transmission(barrier, std::conj(src.pole())));
        double worst = 0.0;
        for (double t : {g2.z + 2.0, g2.z + 9.0}) {
            const double t1 = t - (g2.z - barrier.width()) - 3.0; // inside the shifted cone
            const Complex r2 = opq.i_term(2, t, t1) / ref.i_term(2, t, t1);
            const Complex r4 = opq.i_term(4, t, t1) / ref.i_term(4, t, t1);
            worst = std::max({worst, std::abs(r2 - st) / std::abs(st),
                              std::abs(r4 - stc) / std::abs(stc)});
        }
        const double small = std::abs(opq.i_term(1, g2.z + 2.0, 1.0)) /
                             std::abs(opq.i_term(2, g2.z + 2.0, 1.0));
        add("opaque factorization", worst < 5e-2 && small < 5e-2,
            "max rel gap = " + fmtg(worst) + ", |I1/I2| = " + fmtg(small));
    }

    // ---- correlation: closed-mode delta lines ------------------------------
    auto closed_grid = [&](const WwContext& ctx) {
        const double h = 10.0 / src.omega;
        GridAxis t1{geom.z + 2.0, geom.z + 17.0, h};
        GridAxis t2{geom.z + 42.0, geom.z + 61.5, h};
        return fill_grid_serial(ctx, t1, t2);
    };
    {
        const CorrelationGrid grid = closed_grid(free_closed);
        const DeltaLine line = extract_delta_line(grid, 10.0 / src.omega);
        const double amp_ref = src.norm / (8.0 * M_PI * geom.z * geom.z);
        const bool ok_delay = std::abs(line.delay - geom.z) <= grid.step1() + 1e-9;
        const bool ok_gamma = std::abs(line.fit_gamma - src.gamma) < 0.01 * src.gamma;
        const bool ok_amp = std::abs(line.fit_amplitude - amp_ref) < 0.02 * amp_ref;
        add("delta line (closed free)", ok_delay && ok_gamma && ok_amp,
            "delay = " + fmtg(line.delay) + ", gamma = " + fmtg(line.fit_gamma) +
                ", amp rel gap = " + fmtg(std::abs(line.fit_amplitude - amp_ref) / amp_ref));

        // on-line factorization e^{-Gamma t1}
        double worst = 0.0;
        for (size_t k = 0; k < line.weight_samples.size(); ++k) {
            const double expect =
                line.weight_samples[0] *
                std::exp(-src.gamma * (line.t1_samples[k] - line.t1_samples[0]));
            worst = std::max(worst, std::abs(line.weight_samples[k] - expect) / expect);
        }
        add("delta factorization e^{-Gamma t1}", worst < 0.01, "max rel gap = " + fmtg(worst));

        // total weight vs corner combination of p
        double wsum = 0.0;
        for (size_t i = 1; i + 1 < grid.n1(); ++i)
            for (size_t j = 1; j + 1 < grid.n2(); ++j)
                wsum += grid.w(i, j) * grid.step1() * grid.step2();
        const double corners = grid.p(grid.n1() - 2, grid.n2() - 2) -
                               grid.p(grid.n1() - 2, 1) - grid.p(1, grid.n2() - 2) +
                               grid.p(1, 1);
        const bool ok_total = std::abs(wsum - corners) <= 0.02 * std::abs(corners);
        add("total weight consistency", ok_total,
            "grid sum " + fmtg(wsum) + " vs corners " + fmtg(corners));

        double wmin = 0.0, wmax = 0.0;
        for (double w : grid.w_values) {
            wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
        }
        // lattice theta's leave O(Gamma h) side lobes next to the ridge
        const double tol = 2.0 * src.gamma * grid.step1();
        add("nonnegativity (closed)", wmin >= -tol * wmax,
            "min w / peak = " + fmtg(wmin / wmax));

        bool monotone = true;
        for (size_t i = 0; i < grid.n1() && monotone; ++i)
            for (size_t j = 1; j < grid.n2(); ++j)
                if (grid.p(i, j) + 1e-12 * p_saturation(free_closed) < grid.p(i, j - 1)) {
                    monotone = false;
                    break;
                }
        for (size_t j = 0; j < grid.n2() && monotone; ++j)
            for (size_t i = 1; i < grid.n1(); ++i)
                if (grid.p(i, j) + 1e-12 * p_saturation(free_closed) < grid.p(i - 1, j)) {
                    monotone = false;
                    break;
                }
        add("monotonicity (closed)", monotone, monotone ? "p nondecreasing" : "violation found");
    }
    {
        const BarrierProfile barrier = BarrierProfile::square(1.0, 1.0, 5.0 * src.omega);
        const WwContext opq_closed(src, geom, barrier, qcfg, AmplitudeMode::opaque_asymptotic);
        const CorrelationGrid grid = closed_grid(opq_closed);
        const DeltaLine line = extract_delta_line(grid, 10.0 / src.omega);
        const double zd = geom.z - barrier.width();
        const double amp_ref =
            src.norm * std::norm(opq_closed.transmission_factor()) / (8.0 * M_PI * zd * zd);
        const bool ok = std::abs(line.delay - zd) <= grid.step1() + 1e-9 &&
                        std::abs(line.fit_amplitude - amp_ref) < 0.02 * amp_ref;
        add("delta line (closed opaque)", ok,
            "delay = " + fmtg(line.delay) + ", amp rel gap = " +
                fmtg(std::abs(line.fit_amplitude - amp_ref) / amp_ref));
    }
    {
        // all-zero grid refuses to report a line
        CorrelationGrid flat;
        GridAxis ax{0.0, 10.0, 1.0};
        flat.t1_axis = ax.values();
        flat.t2_axis = ax.values();
        flat.p_values.assign(flat.n1() * flat.n2(), 0.0);
        flat.differentiate();
        bool threw = false;
        try {
            extract_delta_line(flat, 1.0);
        } catch (const no_concentration_error&) {
            threw = true;
        }
        add("no concentration detection", threw, threw ? "raised as specified" : "missed");
    }
    {
        // closed-mode scale invariance under (O,G,mu,z,t) -> (sO,sG,smu,z/s,t/s)
        const double s = 3.0;
        auto run = [&](double scale) {
            SourceParams s2{src.omega * scale, src.gamma * scale, src.norm};
            Geometry g2{geom.z / scale, geom.light_cone_margin};
            const BarrierProfile bar =
                BarrierProfile::square(1.0 / scale, 1.0 / scale, 5.0 * src.omega * scale);
            const WwContext ctx(s2, g2, bar, qcfg, AmplitudeMode::opaque_asymptotic);
            const double h = 10.0 / s2.omega;
            GridAxis t1{g2.z + 2.0 / scale, g2.z + 17.0 / scale, h};
            GridAxis t2{g2.z + 42.0 / scale, g2.z + 61.5 / scale, h};
            const CorrelationGrid grid = fill_grid_serial(ctx, t1, t2);
            const DeltaLine line = extract_delta_line(grid, 10.0 / s2.omega);
            const TunnelingObservables obs = tunneling_observables(line, g2, bar);
            return std::array<double, 3>{s2.gamma * obs.clock_tunneling_time,
                                         line.delay / g2.z,
                                         std::norm(ctx.transmission_factor())};
        };
        const auto base = run(1.0);
        const auto scaled = run(s);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst,
                             std::abs(base[i] - scaled[i]) / std::max(1e-12, std::abs(base[i])));
        add("scale invariance (closed)", worst < 1e-6, "max rel gap = " + fmtg(worst));
    }
    {
        // configuration round-trip through the echo format
        RunConfig c;
        c.source = src;
        c.geometry = geom;
        c.quadrature = qcfg;
        c.t1 = GridAxis{geom.z + 2.0, geom.z + 17.0, 10.0 / src.omega};
        c.t2 = GridAxis{geom.z + 42.0, geom.z + 61.5, 10.0 / src.omega};
        const std::string once = c.echo_json();
        const RunConfig re = RunConfig::load_json_text(once);
        const bool ok = re.echo_json() == once;
        add("config round-trip", ok, ok ? "echo fixed point" : "echo drifted");
    }

    return report;
}

std::string ValidateReport::to_json() const
{
    ordered_json j;
    j["seed"] = seed;
    j["passed"] = int(suites.size()) - failed;
    j["failed"] = failed;
    ordered_json arr = ordered_json::array();
    for (const auto& s : suites)
        arr.push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
    j["suites"] = arr;
    return j.dump(2) + "\n";
}

std::string ValidateReport::human_summary() const
{
    std::string out;
    for (const auto& s : suites)
        out += std::string(s.pass ? "PASS" : "FAIL") + "  " + s.name + "  (" + s.detail + ")\n";
    out += std::to_string(suites.size() - size_t(failed)) + "/" + std::to_string(suites.size()) +
           " suites passed\n";
    return out;
}

int cmd_validate(const std::optional<RunConfig>& cfg, const CommandOptions& opt)
{
    apply_thread_option(opt.threads);
    const ValidateReport report = run_validation_suites(cfg, opt);
    std::fputs(report.human_summary().c_str(), stdout);
    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream out(opt.out_dir + "/validate.json", std::ios::binary);
        out << report.to_json();
    }
    return report.failed == 0 ? 0 : 1;
}

} // namespace ptcorr
