#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gridstudies/common/error.hpp"

namespace gridstudies::cli {

namespace {

const char* type_word(const json& v) {
    if (v.is_boolean()) return "a boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "an integer";
    if (v.is_number()) return "a number";
    if (v.is_string()) return "a string";
    if (v.is_array()) return "an array";
    if (v.is_object()) return "an object";
    return "null";
}

bool compatible(const json& def, const json& v) {
    if (def.is_null()) return true;
    if (def.is_number_float()) return v.is_number() || v.is_null();
    if (def.is_number()) {
        if (v.is_number_integer() || v.is_number_unsigned()) return true;
        return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
    }
    if (def.is_array()) {
        if (!v.is_array()) return false;
        if (def.empty()) return true;
        for (const auto& e : v) {
            if (!compatible(def.front(), e)) return false;
        }
        return true;
    }
    if (def.is_boolean()) return v.is_boolean();
    if (def.is_string()) return v.is_string();
    return def.type() == v.type();
}

}  // namespace

void overlay(json& target, const json& user, const std::string& where) {
    if (!user.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, value] : user.items()) {
        const std::string name = where + "." + key;
        if (!target.contains(key)) throw ConfigError("unknown key '" + name + "'");
        json& slot = target[key];
        if (slot.is_object()) {
            overlay(slot, value, name);
            continue;
        }
        if (!compatible(slot, value)) {
            throw ConfigError("key '" + name + "' expects " + std::string(type_word(slot)) + ", got " + type_word(value));
        }
        slot = value;
    }
}

const json& Params::at(const std::string& key) const {
    if (!block_.contains(key)) throw ConfigError("missing key '" + name(key) + "'");
    return block_.at(key);
}

double Params::num(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError("key '" + name(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("key '" + name(key) + "' must be finite");
    return d;
}

std::int64_t Params::integer(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<std::int64_t>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<std::int64_t>(v.get<double>());
    throw ConfigError("key '" + name(key) + "' must be an integer");
}

std::size_t Params::count(const std::string& key) const {
    const auto v = integer(key);
    if (v < 0) throw ConfigError("key '" + name(key) + "' must be nonnegative");
    return static_cast<std::size_t>(v);
}

bool Params::flag(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) throw ConfigError("key '" + name(key) + "' must be a boolean");
    return v.get<bool>();
}

std::string Params::str(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError("key '" + name(key) + "' must be a string");
    return v.get<std::string>();
}

std::optional<double> Params::opt_num(const std::string& key) const {
    if (at(key).is_null()) return std::nullopt;
    return num(key);
}

std::vector<double> Params::nums(const std::string& key) const {
    const auto& v = at(key);
    std::vector<double> out;
    if (!v.is_array()) throw ConfigError("key '" + name(key) + "' must be an array of numbers");
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("key '" + name(key) + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<int> Params::ints(const std::string& key) const {
    std::vector<int> out;
    for (double d : nums(key)) {
        if (std::floor(d) != d) throw ConfigError("key '" + name(key) + "' must hold integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

Params Params::sub(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_object()) throw ConfigError("key '" + name(key) + "' must be an object");
    return Params(v, name(key));
}

void check(const std::string& key, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const InvalidArgument& e) {
        throw ConfigError("invalid '" + key + "': " + e.what());
    }
}

std::filesystem::path RunContext::output(const std::string& name) {
    const std::filesystem::path rel(name);
    if (rel.is_absolute() || rel.filename() != rel) throw std::logic_error("output names must be plain file names");
    const auto path = out_dir / rel;
    record(path);
    return path;
}

void RunContext::record(const std::filesystem::path& path) {
    for (const auto& p : outputs) {
        if (p == path) return;
    }
    outputs.push_back(path);
}

CLI::Option* FlagSet::toggle(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app.add_flag(flag, *value, help);
    appliers_.push_back([value, opt, key](json& params) {
        if (opt->count() > 0) set(params, key, json(*value));
    });
    return opt;
}

void FlagSet::apply(json& params, const std::string& where) const {
    json flags = json::object();
    for (const auto& a : appliers_) a(flags);
    // Flags pass through the same strict overlay as the config file.
    overlay(params, flags, where);
}

void FlagSet::set(json& params, const std::string& dotted_key, const json& value) {
    json* node = &params;
    std::size_t start = 0;
    for (std::size_t dot; (dot = dotted_key.find('.', start)) != std::string::npos; start = dot + 1) {
        node = &(*node)[dotted_key.substr(start, dot - start)];
    }
    (*node)[dotted_key.substr(start)] = value;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const RunContext& ctx, const std::string& started_utc, double wall_seconds, const json& error) {
    json m;
    m["tool"] = "gridstudies";
    m["version"] = GRIDSTUDIES_VERSION;
    m["study"] = ctx.study;
    m["config_hash"] = "fnv1a64:" + fnv1a_hex(ctx.config.dump());
    m["seed"] = ctx.seed;
    m["threads"] = ctx.threads;
    m["started_utc"] = started_utc;
    m["wall_seconds"] = wall_seconds;
    m["status"] = error.is_null() ? "ok" : "error";
    json files = json::array();
    for (const auto& p : ctx.outputs) {
        std::error_code ec;
        const auto size = std::filesystem::file_size(p, ec);
        json f;
        f["path"] = std::filesystem::relative(p, ctx.out_dir).generic_string();
        if (ec) {
            f["bytes"] = nullptr;
        } else {
            f["bytes"] = size;
        }
        files.push_back(f);
    }
    m["outputs"] = files;
    if (!error.is_null()) m["error"] = error;
    m["config"] = ctx.config;
    std::ofstream out(ctx.out_dir / ctx.manifest_name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest in " + ctx.out_dir.string());
    out << m.dump(2) << '\n';
}

}  // namespace gridstudies::cli
