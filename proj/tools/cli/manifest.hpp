#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "needles/config.hpp"

namespace needles::cli {

/// Typed JSON object of every resolved field.
nlohmann::json config_to_json(const ResolvedConfig& config);

/// Inverse of config_to_json, validated against `schema` like a config file.
ResolvedConfig config_from_json(const nlohmann::json& config, const ConfigSchema& schema, const std::string& origin);

struct Manifest {
    std::string tool = "needles";
    std::string version;
    std::string subcommand;
    std::uint64_t seed = 0;
    ResolvedConfig config;
    std::vector<std::string> outputs;
    nlohmann::json results = nlohmann::json::object();
    double wall_time_seconds = 0.0;
};

nlohmann::json manifest_to_json(const Manifest& m);
void write_manifest(const std::string& path, const Manifest& m);
/// Reads a manifest and re-resolves its config against the subcommand schema.
Manifest read_manifest(const std::string& path);

}  // namespace needles::cli
