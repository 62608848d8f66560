#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "gridstudies/common/error.hpp"
#include "studies.hpp"

namespace fs = std::filesystem;
using namespace gridstudies::cli;

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 1;

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Globals {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
    std::string config;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

RunContext resolve(const std::vector<StudyDef>& studies, const std::vector<FlagSet>& flags, const CLI::App& app,
                   const Globals& g, const StudyDef*& chosen) {
    json file = json::object();
    if (!g.config.empty()) {
        file = read_config_file(g.config);
        if (!file.is_object()) throw ConfigError("config file must hold an object");
    }
    std::string study;
    for (const auto& def : studies) {
        if (app.got_subcommand(def.name)) study = def.name;
    }
    if (file.contains("study")) {
        if (!file["study"].is_string()) throw ConfigError("key 'study' must be a string");
        const auto named = file["study"].get<std::string>();
        if (!study.empty() && named != study) throw ConfigError("key 'study' names " + named + " but the command is " + study);
        study = named;
    }
    if (study.empty()) throw ConfigError("no study given; use a subcommand or the 'study' key");

    std::size_t idx = studies.size();
    for (std::size_t i = 0; i < studies.size(); ++i) {
        if (studies[i].name == study) idx = i;
    }
    if (idx == studies.size()) throw ConfigError("key 'study' names unknown study " + study);
    chosen = &studies[idx];

    for (const auto& [key, value] : file.items()) {
        if (key == "study" || key == "seed" || key == "out" || key == "threads" || key == study) continue;
        bool other = false;
        for (const auto& def : studies) other = other || def.name == key;
        if (other) throw ConfigError("key '" + key + "' does not apply to study " + study);
        throw ConfigError("unknown key '" + key + "'");
    }

    RunContext ctx;
    ctx.study = study;
    ctx.params = chosen->defaults();
    if (file.contains(study)) overlay(ctx.params, file[study], study);
    flags[idx].apply(ctx.params, study);

    ctx.seed = g.seed;
    if (!g.seed_opt->count() && file.contains("seed")) {
        if (!file["seed"].is_number_unsigned() && !(file["seed"].is_number_integer() && file["seed"].get<std::int64_t>() >= 0)) {
            throw ConfigError("key 'seed' must be a nonnegative integer");
        }
        ctx.seed = file["seed"].get<std::uint64_t>();
    }
    ctx.threads = g.threads;
    if (!g.threads_opt->count() && file.contains("threads")) {
        if (!file["threads"].is_number_unsigned() && !(file["threads"].is_number_integer() && file["threads"].get<std::int64_t>() >= 0)) {
            throw ConfigError("key 'threads' must be a nonnegative integer");
        }
        ctx.threads = file["threads"].get<unsigned>();
    }
    std::string out = g.out;
    if (!g.out_opt->count()) {
        if (file.contains("out")) {
            if (!file["out"].is_string()) throw ConfigError("key 'out' must be a string");
            out = file["out"].get<std::string>();
        } else {
            out = "out/" + study;
        }
    }
    if (out.empty()) throw ConfigError("key 'out' must not be empty");
    const fs::path out_path(out);
    if (study == "fault-lab" && out_path.extension() == ".csv") {
        ctx.out_file = out_path;
        ctx.out_dir = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
        ctx.manifest_name = out_path.stem().string() + ".manifest.json";
    } else {
        ctx.out_dir = out_path;
    }

    ctx.config["study"] = study;
    ctx.config["seed"] = ctx.seed;
    ctx.config["threads"] = ctx.threads;
    ctx.config["out"] = out;
    ctx.config[study] = ctx.params;
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power-system case studies: fault location, lightning performance, distribution feeders and transient stability"};
    app.name("gridstudies");
    app.set_version_flag("--version", GRIDSTUDIES_VERSION);
    app.require_subcommand(0, 1);
    app.fallthrough();

    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "Random seed (default 1)");
    g.threads_opt = app.add_option("--threads", g.threads, "Worker threads, 0 = hardware concurrency");
    g.out_opt = app.add_option("--out", g.out, "Output directory (fault-lab also accepts FILE.csv)");
    app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

    const auto studies = all_studies();
    std::vector<FlagSet> flags(studies.size());
    for (std::size_t i = 0; i < studies.size(); ++i) {
        auto* sub = app.add_subcommand(studies[i].name, studies[i].description);
        studies[i].flags(*sub, flags[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigExit;
    }

    const StudyDef* def = nullptr;
    RunContext ctx;
    try {
        ctx = resolve(studies, flags, app, g, def);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    }
    if (print_config) {
        std::cout << ctx.config.dump(2) << '\n';
        return 0;
    }

    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << ctx.out_dir.string() << ": " << ec.message() << '\n';
        return kRuntimeExit;
    }
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    try {
        def->run(ctx);
        write_manifest(ctx, started, elapsed(), nullptr);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::exception& e) {
        json err;
        err["kind"] = dynamic_cast<const gridstudies::Error*>(&e) ? "study" : "system";
        err["message"] = e.what();
        try {
            write_manifest(ctx, started, elapsed(), err);
        } catch (const std::exception& m) {
            std::cerr << "error: " << m.what() << '\n';
        }
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeExit;
    }
}
