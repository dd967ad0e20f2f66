#include "ptcorr/correlation.hpp"

#include <algorithm>
#include <cmath>

namespace ptcorr {

namespace {

double smooth_theta(double x, double eps)
{
    if (eps <= 0.0) return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5);
    return 0.5 * (1.0 + std::erf(x / (eps * std::sqrt(2.0))));
}

PointResult omega_band_power(const WwContext& ctx,
                             const std::function<Complex(double)>& amplitude)
{
    const SourceParams& src = ctx.source();
    const double W = ctx.omega_cut();
    const double gamma = src.gamma;

    std::vector<double> splits;
    for (double k : {-200.0, -50.0, -5.0, 0.0, 5.0, 50.0, 200.0}) {
        const double w = src.omega + k * gamma;
        if (w > 0.0 && w < W) splits.push_back(w);
    }

    auto f = [&](double w) { return Complex(std::norm(amplitude(w)), 0.0); };
    const IntegralResult r = integrate_adaptive(f, 0.0, W, ctx.config(), splits);

    PointResult out;
    out.value = src.norm * r.value.real();
    // |M|^2 falls off like 1/(w - Omega)^2 beyond the band edge
    const double tail = std::norm(amplitude(W)) * (W - src.omega);
    out.error = src.norm * (r.error_estimate + tail);
    out.ok = r.converged;
    return out;
}

} // namespace

std::vector<double> GridAxis::values() const
{
    validate("grid");
    std::vector<double> v;
    const long n = std::lround(std::floor((max - min) / step + 1e-9)) + 1;
    v.reserve(size_t(n));
    for (long i = 0; i < n; ++i) v.push_back(min + double(i) * step);
    return v;
}

void GridAxis::validate(const char* name) const
{
    if (!(step > 0.0))
        throw std::invalid_argument(std::string(name) + ": step must be > 0");
    if (!(max > min))
        throw std::invalid_argument(std::string(name) + ": max must exceed min");
}

double p_saturation(const WwContext& ctx)
{
    const double z_eff = ctx.effective_distance();
    const double t2fac = std::norm(ctx.transmission_factor());
    return ctx.source().norm * t2fac /
           (8.0 * M_PI * z_eff * z_eff * ctx.source().gamma);
}

PointResult p_joint(const WwContext& ctx, double t1, double t2)
{
    if (!(t1 >= 0.0) || !(t2 >= 0.0))
        throw std::invalid_argument("p_joint: times must be >= 0");

    if (ctx.mode() != AmplitudeMode::numeric) {
        const double gamma = ctx.source().gamma;
        const double z_eff = ctx.effective_distance();
        const double eps = ctx.smoothing_epsilon();
        const double sat = p_saturation(ctx);
        PointResult out;
        out.value = sat * (1.0 -
                           smooth_theta(t1 + z_eff - t2, eps) * std::exp(-gamma * (t2 - z_eff)) -
                           smooth_theta(t2 - t1 - z_eff, eps) * std::exp(-gamma * t1));
        return out;
    }

    return omega_band_power(ctx, [&](double w) { return ctx.joint_amplitude(w, t1, t2); });
}

PointResult single_click_rate(const WwContext& ctx, double t2)
{
    if (!(t2 >= 0.0))
        throw std::invalid_argument("single_click_rate: t2 must be >= 0");

    if (ctx.mode() != AmplitudeMode::numeric) {
        const double gamma = ctx.source().gamma;
        const double z_eff = ctx.effective_distance();
        PointResult out;
        out.value = p_saturation(ctx) * (1.0 - std::exp(-gamma * (t2 - z_eff)));
        return out;
    }

    return omega_band_power(ctx, [&](double w) { return ctx.single_time_amplitude(w, t2); });
}

void CorrelationGrid::differentiate()
{
    const size_t rows = n1(), cols = n2();
    w_values.assign(rows * cols, 0.0);
    if (rows < 3 || cols < 3) return;
    const double h1 = step1(), h2 = step2();
    const double inv = 1.0 / (4.0 * h1 * h2);
    for (size_t i = 1; i + 1 < rows; ++i) {
        for (size_t j = 1; j + 1 < cols; ++j) {
            w_values[i * cols + j] = (p(i + 1, j + 1) - p(i + 1, j - 1) -
                                      p(i - 1, j + 1) + p(i - 1, j - 1)) * inv;
        }
    }
}

namespace {

CorrelationGrid fill_grid(const WwContext& ctx, const GridAxis& t1, const GridAxis& t2,
                          bool parallel)
{
    CorrelationGrid g;
    g.t1_axis = t1.values();
    g.t2_axis = t2.values();
    const size_t rows = g.n1(), cols = g.n2();
    g.p_values.assign(rows * cols, 0.0);
    std::vector<double> errs(rows * cols, 0.0);
    std::vector<char> ok(rows * cols, 1);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
#endif
    for (long idx = 0; idx < long(rows * cols); ++idx) {
        const size_t i = size_t(idx) / cols;
        const size_t j = size_t(idx) % cols;
        const PointResult r = p_joint(ctx, g.t1_axis[i], g.t2_axis[j]);
        g.p_values[size_t(idx)] = r.value;
        errs[size_t(idx)] = r.error;
        ok[size_t(idx)] = r.ok ? 1 : 0;
    }

    for (size_t k = 0; k < rows * cols; ++k) {
        if (!ok[k]) ++g.flagged_points;
        g.max_point_error = std::max(g.max_point_error, errs[k]);
    }
    g.differentiate();
    return g;
}

} // namespace

CorrelationGrid fill_grid_serial(const WwContext& ctx, const GridAxis& t1, const GridAxis& t2)
{
    return fill_grid(ctx, t1, t2, false);
}

CorrelationGrid fill_grid_parallel(const WwContext& ctx, const GridAxis& t1, const GridAxis& t2)
{
    return fill_grid(ctx, t1, t2, true);
}

DeltaLine extract_delta_line(const CorrelationGrid& grid, double band_width)
{
    const size_t rows = grid.n1(), cols = grid.n2();
    if (rows < 4 || cols < 4)
        throw std::invalid_argument("extract_delta_line: grid too small");
    const double h = grid.step1();
    if (std::abs(grid.step2() - h) > 1e-9 * h)
        throw std::invalid_argument("extract_delta_line: t1/t2 steps must match");

    // average |w| along each diagonal t2 - t1 = const, then integrate across
    // a band of neighbouring diagonals
    const long dmin = -(long(rows) - 2) + 1;
    const long dmax = long(cols) - 2 - 1;
    if (dmax < dmin)
        throw std::invalid_argument("extract_delta_line: grid has no interior diagonals");

    const double off = grid.t2_axis[0] - grid.t1_axis[0];
    auto diag_mean = [&](long d) {
        double sum = 0.0;
        size_t count = 0;
        for (size_t i = 1; i + 1 < rows; ++i) {
            const long j = long(i) + d;
            if (j < 1 || j + 1 >= long(cols)) continue;
            sum += grid.w(i, size_t(j));
            ++count;
        }
        return count >= 2 ? sum / double(count) : 0.0;
    };

    std::vector<double> diag(size_t(dmax - dmin + 1));
    for (long d = dmin; d <= dmax; ++d) diag[size_t(d - dmin)] = diag_mean(d);

    const long halo = std::max(1L, std::lround(band_width / h));
    std::vector<double> band(diag.size(), 0.0);
    for (size_t k = 0; k < diag.size(); ++k) {
        for (long m = -halo; m <= halo; ++m) {
            const long kk = long(k) + m;
            if (kk >= 0 && kk < long(diag.size())) band[size_t(k)] += diag[size_t(kk)] * h;
        }
    }

    size_t kbest = 0;
    for (size_t k = 1; k < band.size(); ++k)
        if (band[k] > band[kbest]) kbest = k;

    std::vector<double> mags;
    mags.reserve(band.size());
    for (double b : band) mags.push_back(std::abs(b));
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double background = mags[mags.size() / 2];

    DeltaLine line;
    line.band_width = band_width;
    line.band_integral = band[kbest];
    line.background = background;
    line.found = band[kbest] > 0.0 && band[kbest] >= 10.0 * background;
    if (!line.found)
        throw no_concentration_error("extract_delta_line: no concentration found "
                                     "(band-integrated w below 10x background everywhere)");

    const long dstar = dmin + long(kbest);
    double tau = off + double(dstar) * h;
    // parabolic refinement across the peak
    if (kbest > 0 && kbest + 1 < band.size()) {
        const double wm = band[kbest - 1], w0 = band[kbest], wp = band[kbest + 1];
        const double den = wm - 2.0 * w0 + wp;
        if (den < 0.0) {
            double delta = 0.5 * (wm - wp) / den;
            delta = std::clamp(delta, -1.0, 1.0);
            tau += delta * h;
        }
    }
    line.delay = tau;

    // one-sided d p/d t2 jump across the ridge, one grid step off the line
    for (size_t j = 2; j + 2 < cols; ++j) {
        const long i_above = long(j) - dstar + 1; // t1 = t2 - tau* + h
        const long i_below = long(j) - dstar - 1; // t1 = t2 - tau* - h
        if (i_above < 0 || i_below < 0 || i_above >= long(rows) || i_below >= long(rows))
            continue;
        if (long(j) - 1 < 0 || j + 1 >= cols) continue;
        const double d_above =
            (grid.p(size_t(i_above), j) - grid.p(size_t(i_above), j - 1)) / h;
        const double d_below =
            (grid.p(size_t(i_below), j + 1) - grid.p(size_t(i_below), j)) / h;
        line.t1_samples.push_back(grid.t2_axis[j] - tau);
        line.weight_samples.push_back(d_above - d_below);
    }

    // exponential fit weight(t1) = A e^{-g t1} over the positive samples
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    size_t n = 0;
    for (size_t k = 0; k < line.weight_samples.size(); ++k) {
        if (line.weight_samples[k] <= 0.0) continue;
        const double x = line.t1_samples[k];
        const double y = std::log(line.weight_samples[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) {
        const double den = double(n) * sxx - sx * sx;
        const double slope = (double(n) * sxy - sx * sy) / den;
        const double icept = (sy - slope * sx) / double(n);
        line.fit_gamma = -slope;
        line.fit_amplitude = std::exp(icept);
    }
    return line;
}

TunnelingObservables tunneling_observables(const DeltaLine& line, const Geometry& geom,
                                           const BarrierProfile& profile)
{
    TunnelingObservables obs;
    obs.arrival_delay = line.delay;
    obs.vacuum_time = geom.z;
    obs.barrier_traversal_time = line.delay - (geom.z - profile.width());
    obs.clock_tunneling_time = line.delay - geom.z;
    return obs;
}

} // namespace ptcorr
