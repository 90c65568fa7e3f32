#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "needles/config.hpp"

namespace needles::cli {

struct CommandOutput {
    std::vector<std::string> files;  ///< names relative to out_dir
    nlohmann::json results = nlohmann::json::object();
};

struct RunContext {
    std::string out_dir;
    int threads = 1;
    std::ostream* log = nullptr;  ///< progress and warnings, may be null
};

/// Runs one subcommand with a resolved config and writes its CSV files.
CommandOutput execute(const std::string& subcommand, const ResolvedConfig& config, const RunContext& ctx);

}  // namespace needles::cli
