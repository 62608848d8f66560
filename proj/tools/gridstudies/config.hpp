#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace gridstudies::cli {

using json = nlohmann::ordered_json;

/// Invalid configuration: exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Copies `user` onto `target` key by key. Every key must already exist in
/// `target` with a compatible type; null defaults accept any value.
void overlay(json& target, const json& user, const std::string& where);

/// Typed reads from a resolved parameter block. Type errors name the key.
class Params {
public:
    Params(const json& block, std::string where) : block_(block), where_(std::move(where)) {}

    double num(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::size_t count(const std::string& key) const;  // integer >= 0
    bool flag(const std::string& key) const;
    std::string str(const std::string& key) const;
    std::optional<double> opt_num(const std::string& key) const;
    std::vector<double> nums(const std::string& key) const;
    std::vector<int> ints(const std::string& key) const;
    Params sub(const std::string& key) const;
    std::string name(const std::string& key) const { return where_ + "." + key; }

private:
    const json& at(const std::string& key) const;

    const json& block_;
    std::string where_;
};

/// Runs `fn` and rethrows library argument errors as ConfigError naming `key`.
void check(const std::string& key, const std::function<void()>& fn);

struct RunContext {
    std::string study;
    json config;  // fully resolved
    json params;  // the study's block
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::filesystem::path out_dir;
    std::string manifest_name = "manifest.json";
    std::optional<std::filesystem::path> out_file;  // set when --out names a file
    std::vector<std::filesystem::path> outputs;

    Params p() const { return Params(params, study); }
    /// Path inside the output directory, recorded for the manifest.
    std::filesystem::path output(const std::string& name);
    /// Records a file written somewhere other than output().
    void record(const std::filesystem::path& path);
};

/// Deferred writes of subcommand flags into the parameter block.
class FlagSet {
public:
    template <class T>
    CLI::Option* option(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app.add_option(flag, *value, help);
        appliers_.push_back([value, opt, key](json& params) {
            if (opt->count() > 0) set(params, key, json(*value));
        });
        return opt;
    }
    CLI::Option* toggle(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help);
    void apply(json& params, const std::string& where) const;

private:
    static void set(json& params, const std::string& dotted_key, const json& value);
    std::vector<std::function<void(json&)>> appliers_;
};

struct StudyDef {
    std::string name;
    std::string description;
    std::function<json()> defaults;
    std::function<void(CLI::App&, FlagSet&)> flags;
    std::function<void(RunContext&)> run;
};

std::string fnv1a_hex(const std::string& text);

/// Writes the manifest; `error` is null on success.
void write_manifest(const RunContext& ctx, const std::string& started_utc, double wall_seconds, const json& error);

}  // namespace gridstudies::cli
