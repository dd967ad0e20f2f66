#include <cstdio>
#include <optional>

#include "CLI11.hpp"

#include "ptcorr/commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"ptcorr: photon arrival-time correlation across a 1D tunnel barrier"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode_override;
    ptcorr::CommandOptions opt;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        sub->add_option("--config", config_path, "run configuration (JSON)")
            ->envname("PTCORR_CONFIG")
            ->required(config_required);
        sub->add_option("--mode", mode_override, "closed|opaque|numeric (overrides config)");
        sub->add_option("--out", opt.out_dir, "output directory (overrides config)")
            ->envname("PTCORR_OUT");
        sub->add_option("--threads", opt.threads, "worker threads for grid fills")
            ->envname("PTCORR_THREADS");
        sub->add_option("--seed", opt.seed, "seed for the randomized property suites")
            ->envname("PTCORR_SEED");
    };

    CLI::App* scatter = app.add_subcommand("scatter", "sweep T, R, R' over real frequencies");
    add_common(scatter, true);
    CLI::App* correlate = app.add_subcommand("correlate", "compute p/w grids and the delta line");
    add_common(correlate, true);
    CLI::App* validate = app.add_subcommand("validate", "run the built-in property suites");
    add_common(validate, false);
    validate->add_option("--inject-fault", opt.inject_fault,
                         "test fixture: perturb a named check (e.g. b1-sign)");

    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<ptcorr::RunConfig> cfg;
        if (!config_path.empty()) {
            ptcorr::RunConfig c = ptcorr::RunConfig::load_file(config_path);
            if (!mode_override.empty()) c.mode = ptcorr::mode_from_name(mode_override);
            c.validate();
            cfg = c;
        }
        if (scatter->parsed()) return ptcorr::cmd_scatter(*cfg, opt);
        if (correlate->parsed()) return ptcorr::cmd_correlate(*cfg, opt);
        return ptcorr::cmd_validate(cfg, opt);
    } catch (const ptcorr::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
