// amprlasso: resampling averages of the Lasso by message passing, Monte-Carlo
// resampling, state evolution and the selection pipelines built on them.
//
// Exit codes: 0 success, 2 configuration error, 3 non-convergence,
// 4 divergence, 5 I/O error, 1 anything else.

#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "ampr/errors.hpp"
#include "commands.hpp"
#include "json_config.hpp"
#include "run_dir.hpp"

namespace {

using namespace amprlasso;

int report(std::optional<RunDir>& run, const std::string& kind, const std::string& what, int code) {
    const std::string line = kind + ": " + what;
    if (run) run->log(line);
    std::cerr << "amprlasso: " << line << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lasso resampling averages by approximate message passing"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; flags on the command line take precedence");
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.allow_config_extras(CLI::config_extras_mode::error);

    Globals globals;
    app.add_option("--out", globals.out, "run directory (default runs/<command>-<timestamp>)");
    app.add_option("--workers", globals.workers, "worker threads, 0 = all cores");
    app.add_option("--seed", globals.seed, "seed of resampling draws and CV folds");
    app.add_flag("--quiet", globals.quiet, "log to the run directory only");

    Selected selected;
    add_commands(app, globals, selected);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    std::optional<RunDir> run;
    try {
        if (selected.run_plain) return selected.run_plain();
        run.emplace(globals.out, selected.name, globals.quiet);
        run->write_text("config.json", app.config_to_str(true));
        run->log("amprlasso " + selected.name + " -> " + run->path().string());
        return selected.run(*run);
    } catch (const ampr::ConfigError& e) {
        return report(run, "configuration error", e.what(), kExitConfig);
    } catch (const ampr::DimensionError& e) {
        return report(run, "configuration error", e.what(), kExitConfig);
    } catch (const ampr::DomainError& e) {
        return report(run, "configuration error", e.what(), kExitConfig);
    } catch (const ampr::NonConvergenceError& e) {
        return report(run, "not converged", e.what(), kExitNonConvergence);
    } catch (const ampr::ResampleError& e) {
        return report(run, "inner solve failed", e.what(), kExitNonConvergence);
    } catch (const ampr::DivergenceError& e) {
        return report(run, "diverged", e.what(), kExitDivergence);
    } catch (const ampr::ParseError& e) {
        return report(run, "malformed input",
                      std::string(e.what()) + " (row " + std::to_string(e.row()) + ", column " +
                          std::to_string(e.column()) + ")",
                      kExitIo);
    } catch (const ampr::IoError& e) {
        return report(run, "I/O error", e.what(), kExitIo);
    } catch (const std::filesystem::filesystem_error& e) {
        return report(run, "I/O error", e.what(), kExitIo);
    } catch (const std::exception& e) {
        return report(run, "error", e.what(), 1);
    }
}
