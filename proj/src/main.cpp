// Command-line driver: runs experiment configs, lists the catalog, and
// validates config files without running them.
//
// Exit codes: 0 = run passed (or list/validate/help succeeded), 1 = the run
// completed but a check failed, 2 = config or usage error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levyfields/config.hpp"
#include "levyfields/errors.hpp"
#include "levyfields/experiments.hpp"
#include "levyfields/parallel.hpp"

namespace {

namespace fs = std::filesystem;
using levyfields::Config;
using levyfields::ConfigError;
using levyfields::RunResult;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

// Picks the output directory for a run and creates it.  An explicit --out
// must not already exist (runs never overwrite each other); the default
// location runs/<experiment>-<timestamp> gets a numeric suffix if taken.
fs::path resolve_out_dir(const std::string& experiment, const std::string& requested) {
    if (!requested.empty()) {
        const fs::path dir(requested);
        if (fs::exists(dir))
            throw ConfigError("output directory '" + requested +
                              "' already exists; runs never overwrite");
        fs::create_directories(dir);
        return dir;
    }
    const fs::path base = fs::path("runs") / (experiment + "-" + utc_timestamp());
    fs::path dir = base;
    for (int k = 1; fs::exists(dir); ++k)
        dir = base.string() + "-" + std::to_string(k);
    fs::create_directories(dir);
    return dir;
}

std::uint64_t resolve_seed(const Config& cfg) {
    if (const char* env = std::getenv("LEVYFIELDS_SEED")) {
        const std::string text(env);
        std::size_t used = 0;
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(text, &used, 10);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || text.empty())
            throw ConfigError("LEVYFIELDS_SEED: not an unsigned integer: '" + text + "'");
        return seed;
    }
    return static_cast<std::uint64_t>(cfg.require_int("seed"));
}

void write_manifest(const fs::path& out_dir, const std::string& experiment,
                    const std::string& config_path, const Config& cfg, std::uint64_t seed,
                    const RunResult& result, double wall_seconds) {
    nlohmann::ordered_json m;
    m["experiment"] = experiment;
    m["config_path"] = config_path;
    m["config_text"] = cfg.text;
    m["seed"] = seed;
    m["threads"] = levyfields::max_threads();
    m["versions"] = {{"project", LEVYFIELDS_VERSION}, {"compiler", __VERSION__}};
    m["outputs"] = result.outputs;
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : result.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    m["checks"] = std::move(checks);
    m["passed"] = result.passed();
    m["wall_time_seconds"] = wall_seconds;

    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw levyfields::Error("cannot write manifest.json");
    out << m.dump(2) << "\n";
}

int cmd_list() {
    for (const auto& info : levyfields::experiment_catalog()) {
        std::cout << info.name << "\n    " << info.description << "\n    parameters: "
                  << info.params << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& config_path) {
    try {
        const Config cfg = levyfields::load_config(config_path);
        levyfields::validate_experiment_config(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    std::cout << "ok: " << config_path << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_request, int threads) {
    Config cfg;
    std::string experiment;
    std::uint64_t seed = 0;
    fs::path out_dir;
    try {
        cfg = levyfields::load_config(config_path);
        levyfields::validate_experiment_config(cfg);
        experiment = cfg.require_string("experiment");
        seed = resolve_seed(cfg);
        if (threads > 0) levyfields::set_max_threads(threads);
        out_dir = resolve_out_dir(experiment, out_request);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::cout << "running " << experiment << " (seed " << seed << ", "
              << levyfields::max_threads() << " thread(s))\n"
              << "output directory: " << out_dir.string() << "\n";

    RunResult result;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        result = levyfields::run_experiment(cfg, seed, out_dir);
    } catch (const levyfields::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& c : result.checks)
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << "\n";
    write_manifest(out_dir, experiment, config_path, cfg, seed, result, wall);
    std::cout << (result.passed() ? "run passed" : "run FAILED") << " ("
              << result.checks.size() << " check(s), " << wall << " s)\n";
    return result.passed() ? 0 : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convolved noise fields: moment, positivity, and spectral experiments"};
    app.require_subcommand(1);

    CLI::App* list = app.add_subcommand("list", "List available experiments");
    (void)list;

    std::string validate_path;
    CLI::App* validate =
        app.add_subcommand("validate", "Parse and validate a config file without running");
    validate->add_option("config", validate_path, "Path to the config file")->required();

    std::string run_path;
    std::string run_out;
    int run_threads = 0;
    CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", run_path, "Path to the config file")->required();
    run->add_option("--out", run_out,
                    "Output directory (must not exist; default runs/<experiment>-<timestamp>)");
    run->add_option("--threads", run_threads, "Worker thread cap (default: hardware)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError; // help/version exit 0, usage errors 2
    }

    try {
        if (app.got_subcommand("list")) return cmd_list();
        if (app.got_subcommand("validate")) return cmd_validate(validate_path);
        return cmd_run(run_path, run_out, run_threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
