#pragma once

#include <string>
#include <vector>

#include "needles/config.hpp"

namespace needles::cli {

/// Subcommand names in display order.
const std::vector<std::string>& subcommands();

/// One-line description for --help.
std::string describe(const std::string& subcommand);

/// Typed fields of a subcommand, including the common out_dir and seed.
/// Throws ValidationError for an unknown subcommand.
ConfigSchema schema_for(const std::string& subcommand);

}  // namespace needles::cli
