// Command-line runner for the R x Q_p quantum scenarios: two-slit evolution,
// continuous-time quantum walks, ball-scan collapse reports and window
// spectra. Exit codes: 0 success, 2 config validation failure, 3 numerical
// contract violation.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "padicqm/experiments.hpp"

namespace {

struct SubcommandArgs {
    std::string config_path;
    std::string out_dir;
};

void add_scenario(CLI::App& app, const char* name, const char* description,
                  padicqm::ScenarioKind kind, int& exit_code) {
    auto args = std::make_shared<SubcommandArgs>();
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", args->config_path, "scenario config file (key = value lines)")
        ->required();
    sub->add_option("--out", args->out_dir, "output directory")->required();
    sub->callback([args, kind, &exit_code] {
        try {
            const auto cfg = padicqm::ScenarioConfig::parse(kind, args->config_path);
            padicqm::run_scenario(cfg, args->out_dir);
        } catch (const padicqm::ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            exit_code = 2;
        } catch (const padicqm::ContractError& e) {
            std::fprintf(stderr, "numerical contract violation: %s\n", e.what());
            exit_code = 3;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            exit_code = 1;
        }
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum mechanics on R x Q_p: scenario runner"};
    app.require_subcommand(1);
    int exit_code = 0;
    add_scenario(app, "two-slit", "two-slit interference in both realms",
                 padicqm::ScenarioKind::TwoSlit, exit_code);
    add_scenario(app, "ctqw", "continuous-time quantum walk from a Hermitian matrix",
                 padicqm::ScenarioKind::Ctqw, exit_code);
    add_scenario(app, "collapse", "ball-scan collapse report over an evolving state",
                 padicqm::ScenarioKind::Collapse, exit_code);
    add_scenario(app, "spectrum", "window eigenvalue table of the Vladimirov Hamiltonian",
                 padicqm::ScenarioKind::Spectrum, exit_code);
    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
