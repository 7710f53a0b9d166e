#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"

namespace {

using mcfar::cli::ConfigError;
using mcfar::cli::RunConfig;

struct CommonFlags {
    std::string config_path;
    std::string preset = "desk";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
};

void add_common(CLI::App* app, CommonFlags& flags) {
    app->add_option("--config", flags.config_path, "JSON configuration file");
    app->add_option("--preset", flags.preset, "base parameter set")
        ->check(CLI::IsMember({"desk", "paper"}));
    app->add_option("--out", flags.out_dir, "output directory");
    app->add_option("--seed", flags.seed, "master seed (overrides the config file)")
        ->each([&](const std::string&) { flags.seed_set = true; });
    app->add_option("--workers", flags.workers, "worker thread cap");
}

RunConfig assemble(const CommonFlags& flags) {
    RunConfig cfg = mcfar::cli::preset(flags.preset);
    if (!flags.config_path.empty()) cfg = mcfar::cli::load_config_file(flags.config_path, cfg);
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.workers > 0) cfg.workers = flags.workers;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HPD-manifold matrix-CFAR detection experiments"};
    app.require_subcommand(1);

    CommonFlags validate_flags, bench_flags, detect_flags, influence_flags;
    std::string sweep = "scr";

    CLI::App* validate = app.add_subcommand("validate", "schema-check a configuration and dry-run one trial");
    add_common(validate, validate_flags);

    CLI::App* bench = app.add_subcommand("bench-mean", "benchmark the BW mean solvers");
    add_common(bench, bench_flags);

    CLI::App* detect = app.add_subcommand("detect", "run a detection-probability sweep");
    add_common(detect, detect_flags);
    detect->add_option("--sweep", sweep, "sweep family")
        ->required()
        ->check(CLI::IsMember({"scr", "fd", "mismatch"}));

    CLI::App* influence = app.add_subcommand("influence", "influence-function robustness curves");
    add_common(influence, influence_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) return mcfar::cli::cmd_validate(assemble(validate_flags), std::cout);
        if (bench->parsed())
            return mcfar::cli::cmd_bench_mean(assemble(bench_flags), bench_flags.out_dir,
                                              std::cerr);
        if (detect->parsed()) {
            const mcfar::SweepKind kind = sweep == "scr"  ? mcfar::SweepKind::Scr
                                          : sweep == "fd" ? mcfar::SweepKind::Fd
                                                          : mcfar::SweepKind::Mismatch;
            return mcfar::cli::cmd_detect(assemble(detect_flags), kind, detect_flags.out_dir,
                                          std::cerr);
        }
        if (influence->parsed())
            return mcfar::cli::cmd_influence(assemble(influence_flags), influence_flags.out_dir,
                                             std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const mcfar::InvalidInput& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
