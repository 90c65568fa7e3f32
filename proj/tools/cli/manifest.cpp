#include "cli/manifest.hpp"

#include <fstream>

#include "cli/schemas.hpp"
#include "needles/csv.hpp"
#include "needles/error.hpp"

namespace needles::cli {

namespace {

std::string json_to_text(const nlohmann::json& v, const std::string& key, const std::string& origin) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ValidationError(origin + ": field '" + key + "' holds a non-numeric list entry");
            out += (out.empty() ? "" : ",") + format_number(x.get<double>());
        }
        return out;
    }
    throw ValidationError(origin + ": field '" + key + "' has an unsupported JSON type");
}

}  // namespace

nlohmann::json config_to_json(const ResolvedConfig& config) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : config.values()) {
        std::visit([&, k = key](const auto& v) { out[k] = v; }, value);
    }
    return out;
}

ResolvedConfig config_from_json(const nlohmann::json& config, const ConfigSchema& schema, const std::string& origin) {
    if (!config.is_object()) throw ValidationError(origin + ": config must be a JSON object");
    std::vector<KeyValue> kv;
    for (const auto& [key, value] : config.items()) kv.push_back({key, json_to_text(value, key, origin), origin + ":" + key});
    return resolve(schema, kv);
}

nlohmann::json manifest_to_json(const Manifest& m) {
    return {{"tool", m.tool},
            {"version", m.version},
            {"subcommand", m.subcommand},
            {"seed", m.seed},
            {"config", config_to_json(m.config)},
            {"outputs", m.outputs},
            {"results", m.results},
            {"wall_time_seconds", m.wall_time_seconds}};
}

void write_manifest(const std::string& path, const Manifest& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << manifest_to_json(m).dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write to " + path + " failed");
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": malformed JSON: " + e.what());
    }
    Manifest m;
    try {
        m.tool = j.at("tool").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.subcommand = j.at("subcommand").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.outputs = j.at("outputs").get<std::vector<std::string>>();
        m.results = j.at("results");
        m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": malformed manifest: " + e.what());
    }
    m.config = config_from_json(j.at("config"), schema_for(m.subcommand), path);
    return m;
}

}  // namespace needles::cli
