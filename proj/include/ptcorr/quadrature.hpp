#ifndef PTCORR_QUADRATURE_HPP
#define PTCORR_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ptcorr {

using Complex = std::complex<double>;

struct QuadratureConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    // rotation of endpoint contours into the upper half plane, radians
    double rotation_angle = 1.5707963267948966;
    // semi-infinite pole integrals are truncated at Re(pole) + omega_cut_k * |Im(pole)| * 2
    // (i.e. Omega + K Gamma for a pole Omega - i Gamma/2), with a tail bound reported
    double omega_cut_k = 2000.0;
    // direct panels switch to endpoint rotation above this phase volume
    double rotation_threshold = 50.0;

    void validate() const;
    double omega_cut(Complex pole) const
    {
        return pole.real() + omega_cut_k * 2.0 * std::abs(pole.imag());
    }
};

enum class QuadratureMethod { direct_adaptive, contour_rotated, pole_subtracted };

struct IntegralResult {
    Complex value{0.0};
    double error_estimate = 0.0;
    long evaluations = 0;
    QuadratureMethod method = QuadratureMethod::direct_adaptive;
    bool converged = true;   // false: best estimate returned, not within tolerance
    bool tail_exceeded = false; // pole integrals: tail bound above abs_tol
};

struct PanelDiag {
    double a = 0.0, b = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod (G7,K15) on [a, b] for a complex integrand of a
// real variable.  `split_points` become initial panel boundaries (interior
// singularities, barrier cutoffs).
IntegralResult integrate_adaptive(const std::function<Complex(double)>& f,
                                  double a, double b,
                                  const QuadratureConfig& cfg,
                                  std::span<const double> split_points = {},
                                  std::vector<PanelDiag>* diag = nullptr);

// Finite oscillatory integral  int_lower^upper f(x) e^{i phase_rate x} dx.
// When phase_rate*(upper-lower) exceeds cfg.rotation_threshold and the
// integrand is analytic in the upper half plane (`analytic_upper`), the
// contour is replaced by two rays from the endpoints along
// e^{i rotation_angle}; otherwise direct adaptive panels are used.
IntegralResult integrate_oscillatory_finite(const std::function<Complex(Complex)>& f,
                                            double lower, double upper,
                                            double phase_rate,
                                            const QuadratureConfig& cfg,
                                            bool analytic_upper = false,
                                            std::span<const double> split_points = {},
                                            std::vector<PanelDiag>* diag = nullptr);

// Semi-infinite pole integral  int_0^inf f(w)/(w - pole) dw  with
// Im(pole) < 0, by subtraction of f(Re pole):
//   int_0^W (f - f(Re pole))/(w - pole) dw + f(Re pole) log((W-pole)/(-pole))
// plus a tail bound beyond W = cfg.omega_cut(pole).  `osc_rate` > 0 declares
// that f oscillates like e^{-i osc_rate w} at large w, which sharpens the
// tail bound; 0 assumes |f| decaying at least like 1/w.
IntegralResult integrate_pole_semiinfinite(const std::function<Complex(double)>& f,
                                           Complex pole,
                                           const QuadratureConfig& cfg,
                                           double osc_rate = 0.0,
                                           std::span<const double> split_points = {},
                                           std::vector<PanelDiag>* diag = nullptr);

void write_panel_csv(const std::string& path, const std::vector<PanelDiag>& diag);

} // namespace ptcorr

#endif
