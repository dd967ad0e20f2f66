// Timing comparison of the serial reference grid fill against the
// OpenMP-parallel one, on the closed-form and numeric pipelines.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "ptcorr/correlation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ptcorr;

namespace {

double time_fill(const WwContext& ctx, const GridAxis& t1, const GridAxis& t2, bool parallel,
                 double* checksum)
{
    const auto start = std::chrono::steady_clock::now();
    const CorrelationGrid g =
        parallel ? fill_grid_parallel(ctx, t1, t2) : fill_grid_serial(ctx, t1, t2);
    const auto stop = std::chrono::steady_clock::now();
    double sum = 0.0;
    for (double v : g.p_values) sum += v;
    *checksum = sum;
    return std::chrono::duration<double>(stop - start).count();
}

void report(const char* name, const WwContext& ctx, const GridAxis& t1, const GridAxis& t2)
{
    double cs_serial = 0.0, cs_par = 0.0;
    const double ts = time_fill(ctx, t1, t2, false, &cs_serial);
    const double tp = time_fill(ctx, t1, t2, true, &cs_par);
    const bool match = std::memcmp(&cs_serial, &cs_par, sizeof cs_serial) == 0;
    std::printf("%-18s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   checksums %s\n",
                name, ts, tp, ts / tp, match ? "match" : "DIFFER");
}

} // namespace

int main(int argc, char** argv)
{
    const bool with_numeric = !(argc > 1 && std::strcmp(argv[1], "--closed-only") == 0);

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    SourceParams src;
    Geometry geom;
    QuadratureConfig qcfg;

    {
        const WwContext ctx(src, geom, BarrierProfile::none(), qcfg,
                            AmplitudeMode::no_barrier_closed);
        GridAxis t1{42.0, 57.0, 0.05};
        GridAxis t2{82.0, 101.5, 0.05};
        report("closed 301x391", ctx, t1, t2);
    }

    if (with_numeric) {
        qcfg.rel_tol = 1e-4;
        const WwContext ctx(src, geom, BarrierProfile::none(), qcfg, AmplitudeMode::numeric,
                            102.0);
        GridAxis t1{42.0, 52.0, 1.0};
        GridAxis t2{82.0, 96.0, 1.0};
        report("numeric 11x15", ctx, t1, t2);
    }
    return 0;
}
