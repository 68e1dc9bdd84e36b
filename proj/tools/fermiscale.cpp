#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fermiscale/fermiscale.hpp"
#include "fermiscale/parallel.hpp"

namespace {

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("FERMISCALE_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
            std::cerr << "warning: ignoring malformed FERMISCALE_THREADS='" << env << "'\n";
        }
    }
    return 0;   // library default: hardware concurrency
}

fermiscale::ExperimentConfig load_or_exit(const std::string& path) {
    const auto result = fermiscale::validate_config(fermiscale::read_text_file(path));
    if (!result.ok()) {
        std::cerr << "invalid config " << path << ":\n";
        for (const auto& e : result.errors) std::cerr << "  - " << e << "\n";
        std::exit(1);
    }
    return *result.config;
}

int run(const std::string& config_path, const fermiscale::RunOptions& options) {
    const auto cfg = load_or_exit(config_path);
    try {
        const auto record = fermiscale::run_experiment(cfg, options);
        std::cout << "run complete: hash " << record.config_hash << ", "
                  << record.size_labels.size() << " sizes, "
                  << fermiscale::format_double(record.timings_s.at("total")) << " s\n"
                  << "report: " << record.scaling_report_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fermiscale: subsystem noise spectra, entanglement and response scaling "
                 "for free-fermion lattice models"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    bool no_plots = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
        cmd->add_option("--threads", threads, "worker thread count");
        cmd->add_flag("--no-plots", no_plots, "skip SVG plot output");
    };

    auto* cmd_run = app.add_subcommand("run", "run an experiment");
    add_common(cmd_run);
    auto* cmd_oracle = app.add_subcommand(
        "oracle", "run an experiment through the literal quadruple-sum path (small systems)");
    add_common(cmd_oracle);
    auto* cmd_validate = app.add_subcommand("validate", "check a config and exit");
    cmd_validate->add_option("config", config_path, "experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (app.got_subcommand(cmd_validate)) {
        try {
            const auto result = fermiscale::validate_config(
                fermiscale::read_text_file(config_path));
            if (result.ok()) {
                std::cout << "OK: " << config_path << " (hash "
                          << result.config->hash() << ")\n";
                return 0;
            }
            for (const auto& e : result.errors) std::cerr << e << "\n";
            return 1;
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
    }

    fermiscale::set_max_threads(resolve_threads(threads));
    fermiscale::RunOptions options;
    options.output_dir = out_dir;
    options.plots = !no_plots;
    options.force_naive = app.got_subcommand(cmd_oracle);
    return run(config_path, options);
}
