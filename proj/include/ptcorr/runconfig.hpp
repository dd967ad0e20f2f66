#ifndef PTCORR_RUNCONFIG_HPP
#define PTCORR_RUNCONFIG_HPP

#include <string>
#include <vector>

#include "ptcorr/correlation.hpp"

namespace ptcorr {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepAxis {
    double min = 0.1;
    double max = 10.0;
    int n = 200;

    std::vector<double> values() const;
};

// One run configuration; everything in natural units c = hbar = 1.  Loaded
// from a single JSON file, re-emitted verbatim by `echo` so that
// load(echo(load(x))) == load(x).
struct RunConfig {
    SourceParams source;
    Geometry geometry;
    BarrierProfile barrier;
    GridAxis t1{42.0, 57.0, 0.5};
    GridAxis t2{82.0, 101.5, 0.5};
    SweepAxis omega_sweep;
    QuadratureConfig quadrature;
    AmplitudeMode mode = AmplitudeMode::no_barrier_closed;
    double smoothing_epsilon = 0.0;
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    static RunConfig load_file(const std::string& path);
    static RunConfig load_json_text(const std::string& text);
    std::string echo_json() const;

    void validate() const; // throws config_error naming the offending field
};

std::string mode_name(AmplitudeMode mode);
AmplitudeMode mode_from_name(const std::string& name);

} // namespace ptcorr

#endif
