#include "ptcorr/runconfig.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ptcorr {

using ordered_json = nlohmann::ordered_json;

namespace {

double get_num(const ordered_json& j, const std::string& where, const char* key,
               double fallback, bool required = false)
{
    if (!j.contains(key)) {
        if (required) throw config_error(where + "." + key + ": missing");
        return fallback;
    }
    if (!j[key].is_number())
        throw config_error(where + "." + key + ": expected a number");
    return j[key].get<double>();
}

} // namespace

std::vector<double> SweepAxis::values() const
{
    std::vector<double> v;
    v.reserve(size_t(n));
    if (n == 1) {
        v.push_back(min);
        return v;
    }
    const double dk = (max - min) / double(n - 1);
    for (int i = 0; i < n; ++i) v.push_back(min + double(i) * dk);
    return v;
}

std::string mode_name(AmplitudeMode mode)
{
    switch (mode) {
    case AmplitudeMode::no_barrier_closed: return "closed";
    case AmplitudeMode::opaque_asymptotic: return "opaque";
    case AmplitudeMode::numeric: return "numeric";
    }
    return "closed";
}

AmplitudeMode mode_from_name(const std::string& name)
{
    if (name == "closed") return AmplitudeMode::no_barrier_closed;
    if (name == "opaque") return AmplitudeMode::opaque_asymptotic;
    if (name == "numeric") return AmplitudeMode::numeric;
    throw config_error("mode: expected one of closed|opaque|numeric, got '" + name + "'");
}

RunConfig RunConfig::load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_json_text(ss.str());
}

RunConfig RunConfig::load_json_text(const std::string& text)
{
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }

    RunConfig c;

    if (j.contains("source")) {
        const auto& s = j["source"];
        c.source.omega = get_num(s, "source", "omega", c.source.omega, true);
        c.source.gamma = get_num(s, "source", "gamma", c.source.gamma, true);
        c.source.norm = get_num(s, "source", "norm", c.source.norm);
    }
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        c.geometry.z = get_num(g, "geometry", "z", c.geometry.z, true);
        c.geometry.light_cone_margin =
            get_num(g, "geometry", "light_cone_margin", c.geometry.light_cone_margin);
    }
    if (j.contains("barrier")) {
        const auto& b = j["barrier"];
        c.barrier.a = get_num(b, "barrier", "a", c.barrier.a);
        c.barrier.segments.clear();
        if (b.contains("segments")) {
            if (!b["segments"].is_array())
                throw config_error("barrier.segments: expected an array");
            for (const auto& seg : b["segments"]) {
                BarrierSegment s;
                s.length = get_num(seg, "barrier.segments[]", "length", 0.0, true);
                s.cutoff = get_num(seg, "barrier.segments[]", "cutoff", 0.0, true);
                c.barrier.segments.push_back(s);
            }
        } else if (b.contains("b") || b.contains("mu")) {
            const double bb = get_num(b, "barrier", "b", 0.0, true);
            const double mu = get_num(b, "barrier", "mu", 0.0, true);
            if (!(bb > c.barrier.a))
                throw config_error("barrier: barrier interval empty (need b > a)");
            c.barrier.segments.push_back(BarrierSegment{bb - c.barrier.a, mu});
        }
    }
    if (j.contains("grids")) {
        const auto& g = j["grids"];
        auto axis = [&](const char* key, GridAxis& out) {
            if (!g.contains(key)) return;
            const auto& a = g[key];
            out.min = get_num(a, std::string("grids.") + key, "min", out.min, true);
            out.max = get_num(a, std::string("grids.") + key, "max", out.max, true);
            out.step = get_num(a, std::string("grids.") + key, "step", out.step, true);
        };
        axis("t1", c.t1);
        axis("t2", c.t2);
        if (g.contains("omega_sweep")) {
            const auto& a = g["omega_sweep"];
            c.omega_sweep.min = get_num(a, "grids.omega_sweep", "min", c.omega_sweep.min, true);
            c.omega_sweep.max = get_num(a, "grids.omega_sweep", "max", c.omega_sweep.max, true);
            c.omega_sweep.n = int(get_num(a, "grids.omega_sweep", "n", c.omega_sweep.n, true));
        }
    }
    if (j.contains("quadrature")) {
        const auto& q = j["quadrature"];
        c.quadrature.rel_tol = get_num(q, "quadrature", "rel_tol", c.quadrature.rel_tol);
        c.quadrature.abs_tol = get_num(q, "quadrature", "abs_tol", c.quadrature.abs_tol);
        c.quadrature.max_subdivisions =
            int(get_num(q, "quadrature", "max_subdivisions", c.quadrature.max_subdivisions));
        c.quadrature.rotation_angle =
            get_num(q, "quadrature", "rotation_angle", c.quadrature.rotation_angle);
        c.quadrature.omega_cut_k = get_num(q, "quadrature", "omega_cut_k", c.quadrature.omega_cut_k);
        c.quadrature.rotation_threshold =
            get_num(q, "quadrature", "rotation_threshold", c.quadrature.rotation_threshold);
    }
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) throw config_error("mode: expected a string");
        c.mode = mode_from_name(j["mode"].get<std::string>());
    }
    c.smoothing_epsilon = get_num(j, "config", "smoothing_epsilon", c.smoothing_epsilon);
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (o.contains("dir")) {
            if (!o["dir"].is_string()) throw config_error("output.dir: expected a string");
            c.out_dir = o["dir"].get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o["formats"].is_array()) throw config_error("output.formats: expected an array");
            c.formats.clear();
            for (const auto& f : o["formats"]) c.formats.push_back(f.get<std::string>());
        }
    }

    c.validate();
    return c;
}

void RunConfig::validate() const
{
    try {
        source.validate();
        geometry.validate(barrier);
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }

    try {
        t1.validate("grids.t1");
        t2.validate("grids.t2");
        quadrature.validate();
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }
    const double tmin = geometry.z + geometry.light_cone_margin / source.omega;
    if (t1.min < tmin - 1e-12)
        throw config_error("grids.t1.min: below the light-cone margin z + margin/omega");
    if (t2.min < tmin - 1e-12)
        throw config_error("grids.t2.min: below the light-cone margin z + margin/omega");
    if (!(omega_sweep.n >= 1)) throw config_error("grids.omega_sweep.n: must be >= 1");
    if (!(omega_sweep.min > 0.0)) throw config_error("grids.omega_sweep.min: must be > 0");
    if (omega_sweep.n > 1 && !(omega_sweep.max > omega_sweep.min))
        throw config_error("grids.omega_sweep.max: must exceed min");
    if (smoothing_epsilon < 0.0) throw config_error("smoothing_epsilon: must be >= 0");
    if (mode == AmplitudeMode::no_barrier_closed && !barrier.empty())
        throw config_error("mode: closed mode requires an empty barrier (use opaque or numeric)");
    if (mode == AmplitudeMode::opaque_asymptotic && barrier.empty())
        throw config_error("mode: opaque mode requires a barrier");
}

std::string RunConfig::echo_json() const
{
    ordered_json j;
    j["source"] = {{"omega", source.omega}, {"gamma", source.gamma}, {"norm", source.norm}};
    j["geometry"] = {{"z", geometry.z}, {"light_cone_margin", geometry.light_cone_margin}};
    ordered_json segs = ordered_json::array();
    for (const auto& s : barrier.segments)
        segs.push_back({{"length", s.length}, {"cutoff", s.cutoff}});
    j["barrier"] = {{"a", barrier.a}, {"segments", segs}};
    j["grids"] = {
        {"t1", {{"min", t1.min}, {"max", t1.max}, {"step", t1.step}}},
        {"t2", {{"min", t2.min}, {"max", t2.max}, {"step", t2.step}}},
        {"omega_sweep", {{"min", omega_sweep.min}, {"max", omega_sweep.max}, {"n", omega_sweep.n}}}};
    j["quadrature"] = {{"rel_tol", quadrature.rel_tol},
                       {"abs_tol", quadrature.abs_tol},
                       {"max_subdivisions", quadrature.max_subdivisions},
                       {"rotation_angle", quadrature.rotation_angle},
                       {"omega_cut_k", quadrature.omega_cut_k},
                       {"rotation_threshold", quadrature.rotation_threshold}};
    j["mode"] = mode_name(mode);
    j["smoothing_epsilon"] = smoothing_epsilon;
    j["output"] = {{"dir", out_dir}, {"formats", formats}};
    return j.dump(2) + "\n";
}

} // namespace ptcorr
