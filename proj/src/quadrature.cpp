#include "ptcorr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

namespace ptcorr {

namespace {

const Complex I(0.0, 1.0);

// Gauss-Kronrod 7-15 abscissae/weights (QUADPACK dqk15)
constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b;
    Complex value;
    double error;
    bool operator<(const Panel& o) const
    {
        if (error != o.error) return error < o.error;
        return a > o.a; // deterministic tie-break
    }
};

Panel gk15(const std::function<Complex(double)>& f, double a, double b, long& evals)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    Complex fv[15];
    Complex k15(0.0), g7(0.0);
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            fv[7] = f(c);
            k15 += wgk[7] * fv[7];
            g7 += wg[3] * fv[7];
            break;
        }
        const double dx = h * xgk[i];
        fv[i] = f(c - dx);
        fv[14 - i] = f(c + dx);
        const Complex pair = fv[i] + fv[14 - i];
        k15 += wgk[i] * pair;
        if (i % 2 == 1) g7 += wg[i / 2] * pair;
    }
    evals += 15;

    k15 *= h;
    g7 *= h;

    // QUADPACK-style scale-invariant error: resasc-weighted (200*delta)^1.5
    const Complex mean = k15 / (b - a);
    double resasc = 0.0;
    for (int i = 0; i < 8; ++i) {
        resasc += wgk[i] * (std::abs(fv[i] - mean) +
                            (i < 7 ? std::abs(fv[14 - i] - mean) : 0.0));
    }
    resasc *= std::abs(h);

    double err = std::abs(k15 - g7);
    if (resasc > 0.0 && err > 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));

    return Panel{a, b, k15, err};
}

// pairwise sum over panels sorted by left edge: deterministic and accurate
Complex pairwise_sum(std::vector<Panel>& panels, size_t lo, size_t hi)
{
    if (hi - lo == 1) return panels[lo].value;
    const size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(panels, lo, mid) + pairwise_sum(panels, mid, hi);
}

IntegralResult adaptive_core(const std::function<Complex(double)>& f,
                             double a, double b,
                             const QuadratureConfig& cfg,
                             std::span<const double> split_points,
                             std::vector<PanelDiag>* diag)
{
    IntegralResult res;
    if (!(a < b)) {
        if (a == b) return res;
        throw std::invalid_argument("integrate: lower bound must be below upper bound");
    }

    std::vector<double> edges{a, b};
    for (double s : split_points)
        if (s > a && s < b) edges.push_back(s);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel> heap;
    Complex total(0.0);
    double total_err = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p = gk15(f, edges[i], edges[i + 1], res.evaluations);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    int splits = 0;
    const double min_width = (b - a) * 1e-15;
    while (splits < cfg.max_subdivisions) {
        const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (total_err <= target) break;
        Panel worst = heap.top();
        if (worst.b - worst.a <= min_width) break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(f, worst.a, mid, res.evaluations);
        Panel right = gk15(f, mid, worst.b, res.evaluations);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }

    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });

    res.value = pairwise_sum(panels, 0, panels.size());
    res.error_estimate = 0.0;
    for (const auto& p : panels) res.error_estimate += p.error;
    res.converged =
        res.error_estimate <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(res.value)) * 1.000001;
    res.method = QuadratureMethod::direct_adaptive;

    if (diag)
        for (const auto& p : panels) diag->push_back(PanelDiag{p.a, p.b, p.error});
    return res;
}

} // namespace

void QuadratureConfig::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("quadrature: tolerances must be > 0");
    if (max_subdivisions < 1)
        throw std::invalid_argument("quadrature: max_subdivisions must be >= 1");
    if (!(rotation_angle > 0.0) || rotation_angle > 1.5707963267948967)
        throw std::invalid_argument("quadrature: rotation_angle must be in (0, pi/2]");
    if (!(omega_cut_k > 0.0))
        throw std::invalid_argument("quadrature: omega_cut_k must be > 0");
}

IntegralResult integrate_adaptive(const std::function<Complex(double)>& f,
                                  double a, double b,
                                  const QuadratureConfig& cfg,
                                  std::span<const double> split_points,
                                  std::vector<PanelDiag>* diag)
{
    return adaptive_core(f, a, b, cfg, split_points, diag);
}

IntegralResult integrate_oscillatory_finite(const std::function<Complex(Complex)>& f,
                                            double lower, double upper,
                                            double phase_rate,
                                            const QuadratureConfig& cfg,
                                            bool analytic_upper,
                                            std::span<const double> split_points,
                                            std::vector<PanelDiag>* diag)
{
    cfg.validate();
    if (!(lower < upper))
        throw std::invalid_argument("integrate_oscillatory_finite: need lower < upper");

    const double phase_volume = std::abs(phase_rate) * (upper - lower);
    const bool rotate = analytic_upper && phase_rate > 0.0 &&
                        phase_volume > cfg.rotation_threshold;

    if (!rotate) {
        auto g = [&](double x) { return f(Complex(x, 0.0)) * std::exp(I * (phase_rate * x)); };
        IntegralResult r = adaptive_core(g, lower, upper, cfg, split_points, diag);
        r.method = QuadratureMethod::direct_adaptive;
        return r;
    }

    // endpoint rotation: int_a^b = ray(a) - ray(b), each ray running from the
    // endpoint along e^{i theta} where the factor e^{i q x} decays
    const Complex dir = std::exp(I * cfg.rotation_angle);
    const double decay = phase_rate * std::sin(cfg.rotation_angle);
    const double t_max = 45.0 / decay;
    const double ray_splits[4] = {t_max * 1e-4, t_max * 1e-3, t_max * 1e-2, t_max * 1e-1};

    IntegralResult res;
    res.method = QuadratureMethod::contour_rotated;
    Complex value(0.0);
    for (double c : {lower, upper}) {
        auto g = [&](double t) {
            const Complex x = c + dir * t;
            return f(x) * std::exp(I * (phase_rate * x));
        };
        IntegralResult ray = adaptive_core(g, 0.0, t_max, cfg, ray_splits, diag);
        res.evaluations += ray.evaluations;
        res.error_estimate += ray.error_estimate;
        res.converged = res.converged && ray.converged;
        const Complex contrib = dir * ray.value;
        value += (c == lower) ? contrib : -contrib;
    }
    // truncation of the rays: |f| bounded by its endpoint sample scale
    const double f_scale = std::abs(f(Complex(upper, 0.0))) + std::abs(f(Complex(lower, 0.0)));
    res.error_estimate += f_scale * std::exp(-decay * t_max) / decay;
    res.value = value;
    return res;
}

IntegralResult integrate_pole_semiinfinite(const std::function<Complex(double)>& f,
                                           Complex pole,
                                           const QuadratureConfig& cfg,
                                           double osc_rate,
                                           std::span<const double> split_points,
                                           std::vector<PanelDiag>* diag)
{
    cfg.validate();
    if (!(pole.imag() < 0.0))
        throw std::invalid_argument("integrate_pole_semiinfinite: pole must lie below the real axis");
    const double re_p = pole.real();
    if (!(re_p > 0.0))
        throw std::invalid_argument("integrate_pole_semiinfinite: Re(pole) must be > 0");

    const double W = cfg.omega_cut(pole);
    const Complex f_at = f(re_p);

    auto g = [&](double w) { return (f(w) - f_at) / (w - pole); };

    // pole neighbourhood and caller-provided breakpoints as panel edges
    const double gamma = -2.0 * pole.imag();
    std::vector<double> edges(split_points.begin(), split_points.end());
    for (double k : {-50.0, -5.0, 0.0, 5.0, 50.0}) edges.push_back(re_p + k * gamma);

    IntegralResult res = adaptive_core(g, 0.0, W, cfg, edges, diag);
    res.method = QuadratureMethod::pole_subtracted;
    ++res.evaluations;

    // f(Re pole) * int_0^W dw/(w - pole) in closed form
    res.value += f_at * (std::log(Complex(W, 0.0) - pole) - std::log(-pole));

    // tail beyond W: integration by parts for oscillating f, 1/w decay otherwise
    const double fW = std::abs(f(W)) + std::abs(f(0.5 * (W + re_p)));
    res.evaluations += 2;
    double tail;
    if (osc_rate > 0.0)
        tail = 2.0 * fW / (osc_rate * (W - re_p));
    else
        tail = fW * W / re_p * std::log(W / (W - re_p));
    res.error_estimate += tail;
    res.tail_exceeded = tail > cfg.abs_tol;
    return res;
}

void write_panel_csv(const std::string& path, const std::vector<PanelDiag>& diag)
{
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_panel_csv: cannot open " + path);
    std::fprintf(fp, "# ptcorr quadrature panels v1\n");
    std::fprintf(fp, "a,b,error\n");
    for (const auto& p : diag)
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", p.a, p.b, p.error);
    std::fclose(fp);
}

} // namespace ptcorr
