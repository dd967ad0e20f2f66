#ifndef PTCORR_CORRELATION_HPP
#define PTCORR_CORRELATION_HPP

#include <vector>

#include "ptcorr/ww.hpp"

namespace ptcorr {

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;

    std::vector<double> values() const;
    void validate(const char* name) const;
};

struct PointResult {
    double value = 0.0;
    double error = 0.0;
    bool ok = true;
};

// Joint click probability p(t1, t2); closed modes evaluate the saturating
// two-branch formula, numeric mode integrates norm * |M_omega(t1,t2)|^2 over
// the detection band [0, omega_cut].
PointResult p_joint(const WwContext& ctx, double t1, double t2);

// Single-detector excitation probability (t1 -> infinity limit of p).
PointResult single_click_rate(const WwContext& ctx, double t2);

// closed-mode saturation scale norm |scriptT|^2 / (8 pi z_eff^2 Gamma)
double p_saturation(const WwContext& ctx);

struct CorrelationGrid {
    std::vector<double> t1_axis;
    std::vector<double> t2_axis;
    std::vector<double> p_values; // row-major, index [i1 * n2 + i2]
    std::vector<double> w_values; // mixed second difference of p / (h1 h2)
    int flagged_points = 0;
    double max_point_error = 0.0;

    size_t n1() const { return t1_axis.size(); }
    size_t n2() const { return t2_axis.size(); }
    double p(size_t i, size_t j) const { return p_values[i * n2() + j]; }
    double w(size_t i, size_t j) const { return w_values[i * n2() + j]; }
    double step1() const { return t1_axis[1] - t1_axis[0]; }
    double step2() const { return t2_axis[1] - t2_axis[0]; }

    void differentiate(); // fills w_values from p_values
};

// Grid fills are data-parallel over points; the parallel variant must agree
// with the serial one bit for bit.
CorrelationGrid fill_grid_serial(const WwContext& ctx, const GridAxis& t1, const GridAxis& t2);
CorrelationGrid fill_grid_parallel(const WwContext& ctx, const GridAxis& t1, const GridAxis& t2);

struct DeltaLine {
    bool found = false;
    double delay = 0.0;      // tau*: w concentrates on t2 - t1 = tau*
    double band_width = 0.0;
    double band_integral = 0.0; // band-integrated w at the ridge
    double background = 0.0;    // off-ridge reference level
    std::vector<double> t1_samples;
    std::vector<double> weight_samples; // W(t2) jump samples vs t1 = t2 - tau*
    double fit_amplitude = 0.0; // weight(t1) ~ fit_amplitude e^{-fit_gamma t1}
    double fit_gamma = 0.0;

    double weight(double t1) const
    {
        return fit_amplitude * std::exp(-fit_gamma * t1);
    }
};

struct no_concentration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Locate the arrival ridge by maximizing band-integrated w over diagonals,
// then read the delta weight off the one-sided d p/d t2 jump across it.
DeltaLine extract_delta_line(const CorrelationGrid& grid, double band_width);

struct TunnelingObservables {
    double arrival_delay = 0.0;          // tau*
    double vacuum_time = 0.0;            // z
    double barrier_traversal_time = 0.0; // tau* - (z - D)
    double clock_tunneling_time = 0.0;   // tau* - z
};

TunnelingObservables tunneling_observables(const DeltaLine& line, const Geometry& geom,
                                           const BarrierProfile& profile);

} // namespace ptcorr

#endif
