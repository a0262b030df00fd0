#include <iostream>

#include <CLI11.hpp>

#include "starweyl/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Forward and inverse spectral computations on star graphs"};
    std::string command;
    std::string config;
    starweyl::CommandOptions options;
    app.add_option("command", command, "Command to run")
        ->required()
        ->check(CLI::IsMember(starweyl::command_names()));
    app.add_option("-c,--config", config, "Configuration file (JSON)")->required();
    app.add_option("-o,--out", options.out_path, "Output CSV path (default: stdout)");
    app.add_option("--weyl-csv", options.weyl_csv, "Measured Weyl matrix grids for reconstruct");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : starweyl::kExitValidation;
    }
    return starweyl::run_cli(config, command, options, std::cout, std::cerr);
}
