#include "cli/app.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "cli/commands.hpp"
#include "cli/manifest.hpp"
#include "cli/schemas.hpp"
#include "needles/error.hpp"

#ifndef NEEDLES_VERSION
#define NEEDLES_VERSION "0.0.0"
#endif

namespace needles::cli {

namespace {

struct SubcommandArgs {
    std::string config_path;
    std::string replay_path;
    std::string manifest_path;
    bool dry_run = false;
    std::map<std::string, std::string> values;  ///< one slot per schema field
    std::map<std::string, CLI::Option*> options;
};

/// Thread count for subcommands that parallelise, from NEEDLES_THREADS.
int thread_count() {
    const char* env = std::getenv("NEEDLES_THREADS");
    if (!env || !*env) return std::max(1u, std::thread::hardware_concurrency());
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
        throw ValidationError(std::string("NEEDLES_THREADS: must be an integer in [1, 4096] (got '") + env + "')");
    }
    return static_cast<int>(n);
}

std::vector<KeyValue> replay_layer(const std::string& path, const std::string& subcommand) {
    const Manifest m = read_manifest(path);
    if (m.subcommand != subcommand) {
        throw ValidationError(path + ": manifest is for '" + m.subcommand + "', not '" + subcommand + "'");
    }
    std::vector<KeyValue> kv;
    for (const auto& [key, value] : m.config.values()) kv.push_back({key, format_field(value), path});
    return kv;
}

void echo(std::ostream& out, const std::string& subcommand, const ConfigSchema& schema, const ResolvedConfig& config) {
    out << "# needles " << subcommand << ", resolved configuration\n";
    for (const FieldSpec& f : schema.fields()) out << f.name << " = " << format_field(config.values().at(f.name)) << '\n';
}

int run_subcommand(const std::string& name, SubcommandArgs& args, std::ostream& out, std::ostream& err) {
    const ConfigSchema schema = schema_for(name);
    std::vector<KeyValue> base;
    if (!args.replay_path.empty()) base = replay_layer(args.replay_path, name);
    if (!args.config_path.empty()) {
        // a config file on top of a replayed manifest wins per key
        std::vector<KeyValue> file = parse_key_values_file(args.config_path);
        std::erase_if(base, [&](const KeyValue& b) {
            return std::any_of(file.begin(), file.end(), [&](const KeyValue& f) { return f.key == b.key; });
        });
        base.insert(base.end(), file.begin(), file.end());
    }
    std::vector<KeyValue> overrides;
    for (const FieldSpec& f : schema.fields()) {
        if (args.options.at(f.name)->count() > 0) overrides.push_back({f.name, args.values.at(f.name), "--" + f.name});
    }
    const ResolvedConfig config = resolve(schema, base, overrides);
    echo(out, name, schema, config);
    if (args.dry_run) return 0;

    RunContext ctx;
    ctx.out_dir = config.text("out_dir");
    ctx.threads = thread_count();
    ctx.log = &err;
    const auto start = std::chrono::steady_clock::now();
    const CommandOutput result = execute(name, config, ctx);
    const auto stop = std::chrono::steady_clock::now();

    Manifest m;
    m.version = NEEDLES_VERSION;
    m.subcommand = name;
    m.seed = config.seed("seed");
    m.config = config;
    m.outputs = result.files;
    m.results = result.results;
    m.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
    const std::string manifest_path =
        args.manifest_path.empty() ? (std::filesystem::path(ctx.out_dir) / "manifest.json").string() : args.manifest_path;
    write_manifest(manifest_path, m);

    for (const auto& f : result.files) out << "wrote " << (std::filesystem::path(ctx.out_dir) / f).string() << '\n';
    out << "wrote " << manifest_path << '\n';
    return 0;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hard-needle excluded-volume models: T-matrix, particle simulation, kinetic and homogeneous PDEs"};
    app.name("needles");
    app.set_version_flag("--version", NEEDLES_VERSION);
    app.require_subcommand(1);

    std::map<std::string, SubcommandArgs> args;
    try {
        for (const auto& name : subcommands()) {
            SubcommandArgs& a = args[name];
            CLI::App* sub = app.add_subcommand(name, describe(name));
            sub->add_option("--config", a.config_path, "key = value configuration file");
            sub->add_option("--replay", a.replay_path, "reuse the configuration recorded in a manifest.json");
            sub->add_option("--manifest", a.manifest_path, "manifest path (default: <out_dir>/manifest.json)");
            sub->add_flag("--dry-run", a.dry_run, "print the resolved configuration and exit");
            const ConfigSchema schema = schema_for(name);
            for (const FieldSpec& f : schema.fields()) {
                std::string& slot = a.values[f.name];
                const std::string help = f.help + " [default: " + f.default_value + "]";
                if (f.kind == FieldKind::flag) {
                    a.options[f.name] = sub->add_flag("--" + f.name + "{true}", slot, help);
                } else {
                    a.options[f.name] = sub->add_option("--" + f.name, slot, help);
                }
            }
        }
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version land here too, with a zero exit code
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    for (CLI::App* sub : app.get_subcommands()) {
        const std::string name = sub->get_name();
        try {
            return run_subcommand(name, args.at(name), out, err);
        } catch (const ValidationError& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        } catch (const IoError& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        } catch (const NumericalError& e) {
            err << "numerical failure: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err << "numerical failure: " << e.what() << '\n';
            return 2;
        }
    }
    return 1;
}

}  // namespace needles::cli
