#include "ptcorr/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ptcorr {

using ordered_json = nlohmann::ordered_json;

namespace {

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void apply_thread_option(int threads)
{
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int cmd_scatter(const RunConfig& cfg, const CommandOptions& opt)
{
    cfg.validate();
    apply_thread_option(opt.threads);
    const std::string dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    ensure_dir(dir);

    const std::vector<double> ks = cfg.omega_sweep.values();
    std::vector<ScatteringCoefficients> rows(ks.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long i = 0; i < long(ks.size()); ++i)
        rows[size_t(i)] = scattering_coefficients(cfg.barrier, Complex(ks[size_t(i)], 0.0));

    double max_unit = 0.0, sum_unit = 0.0, max_b1 = 0.0;
    std::string csv = "# ptcorr scatter v1\n"
                      "kz_re,kz_im,T_re,T_im,R_re,R_im,Rp_re,Rp_im,absT2\n";
    for (const auto& sc : rows) {
        const double u = cfg.barrier.empty() ? 0.0 : sc.unitarity_residual();
        max_unit = std::max(max_unit, u);
        sum_unit += u;
        max_b1 = std::max(max_b1, b1_residual(sc, cfg.barrier));
        csv += fmt(sc.kz.real()) + "," + fmt(sc.kz.imag()) + "," +
               fmt(sc.T.real()) + "," + fmt(sc.T.imag()) + "," +
               fmt(sc.R.real()) + "," + fmt(sc.R.imag()) + "," +
               fmt(sc.Rprime.real()) + "," + fmt(sc.Rprime.imag()) + "," +
               fmt(std::norm(sc.T)) + "\n";
    }
    write_text(dir + "/scatter.csv", csv);

    ordered_json meta;
    meta["profile"] = ordered_json::parse(cfg.echo_json())["barrier"];
    meta["sweep"] = {{"min", cfg.omega_sweep.min}, {"max", cfg.omega_sweep.max},
                     {"n", cfg.omega_sweep.n}};
    meta["unitarity_residual"] = {{"max", max_unit},
                                  {"mean", ks.empty() ? 0.0 : sum_unit / double(ks.size())}};
    meta["b1_residual_max"] = max_b1;
    write_text(dir + "/scatter.json", meta.dump(2) + "\n");
    write_text(dir + "/config_echo.json", cfg.echo_json());
    return 0;
}

int cmd_correlate(const RunConfig& cfg, const CommandOptions& opt)
{
    cfg.validate();
    apply_thread_option(opt.threads);
    const std::string dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    ensure_dir(dir);
    write_text(dir + "/config_echo.json", cfg.echo_json());

    const WwContext ctx(cfg.source, cfg.geometry, cfg.barrier, cfg.quadrature, cfg.mode,
                        cfg.t2.max, cfg.smoothing_epsilon);
    const CorrelationGrid grid = fill_grid_parallel(ctx, cfg.t1, cfg.t2);

    const bool closed = cfg.mode != AmplitudeMode::numeric;
    std::optional<WwContext> sharp_ref;
    if (closed && cfg.smoothing_epsilon > 0.0)
        sharp_ref.emplace(cfg.source, cfg.geometry, cfg.barrier, cfg.quadrature, cfg.mode, 0.0, 0.0);

    std::string csv = std::string("# ptcorr correlation v1 mode=") + mode_name(cfg.mode) +
                      (closed ? " columns=t1,t2,p,w,p_ref\n" : " columns=t1,t2,p,w\n");
    csv += closed ? "t1,t2,p,w,p_ref\n" : "t1,t2,p,w\n";
    for (size_t i = 0; i < grid.n1(); ++i) {
        for (size_t j = 0; j < grid.n2(); ++j) {
            csv += fmt(grid.t1_axis[i]) + "," + fmt(grid.t2_axis[j]) + "," +
                   fmt(grid.p(i, j)) + "," + fmt(grid.w(i, j));
            if (closed) {
                const WwContext& rc = sharp_ref ? *sharp_ref : ctx;
                csv += "," + fmt(p_joint(rc, grid.t1_axis[i], grid.t2_axis[j]).value);
            }
            csv += "\n";
        }
    }
    write_text(dir + "/grid.csv", csv);

    ordered_json summary;
    std::vector<std::string> errors;
    if (grid.flagged_points > 0)
        errors.push_back(std::to_string(grid.flagged_points) +
                         " grid points with unconverged quadrature");

    bool extraction_ok = true;
    DeltaLine line;
    try {
        line = extract_delta_line(grid, 10.0 / cfg.source.omega);
    } catch (const no_concentration_error& e) {
        extraction_ok = false;
        errors.push_back(e.what());
    }

    const TunnelingObservables obs = tunneling_observables(line, cfg.geometry, cfg.barrier);
    summary["mode"] = mode_name(cfg.mode);
    summary["delay"] = line.delay;
    summary["found"] = line.found;
    summary["band_width"] = line.band_width;
    summary["weight_fit"] = {{"amplitude", line.fit_amplitude}, {"gamma", line.fit_gamma}};
    summary["vacuum_time"] = obs.vacuum_time;
    summary["barrier_traversal_time"] = obs.barrier_traversal_time;
    summary["clock_tunneling_time"] = obs.clock_tunneling_time;
    summary["transmission_mod2"] = std::norm(ctx.transmission_factor());
    summary["p_saturation_closed"] = p_saturation(ctx);
    summary["wigner_phase_time"] = wigner_phase_time(cfg.barrier, cfg.source.omega);
    summary["flagged_points"] = grid.flagged_points;
    summary["max_point_error"] = grid.max_point_error;
    summary["errors"] = errors;
    write_text(dir + "/summary.json", summary.dump(2) + "\n");

    if (!extraction_ok || grid.flagged_points > 0) return 3;
    return 0;
}

BarrierProfile random_profile(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    BarrierProfile p;
    p.a = 0.5 + 2.5 * u01(rng);
    const int nseg = 1 + int(u01(rng) * 3.0);
    for (int i = 0; i < nseg; ++i) {
        BarrierSegment s;
        s.length = 0.2 + 1.8 * u01(rng);
        s.cutoff = 8.0 * u01(rng);
        p.segments.push_back(s);
    }
    return p;
}

} // namespace ptcorr
