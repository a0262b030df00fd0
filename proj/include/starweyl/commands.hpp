#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "starweyl/config.hpp"
#include "starweyl/errors.hpp"

namespace starweyl {

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitIo = 4 };

struct CommandOptions {
    std::string out_path;                // empty: write to the output stream
    std::vector<std::string> weyl_csv;   // reconstruct: measured M_s grids
};

const std::vector<std::string>& command_names();

int exit_code_for(ErrorCode code);

/// One-line JSON error record.
void write_error(std::ostream& err, const std::string& code, const std::string& message);

/// Runs one command. Library errors are reported on `err` and mapped to an
/// exit code; flags inside grids are data, not failures.
int run_command(const RunConfig& config, const std::string& command, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

/// Loads the config file and dispatches.
int run_cli(const std::string& config_path, const std::string& command, const CommandOptions& options,
            std::ostream& out, std::ostream& err);

}  // namespace starweyl
