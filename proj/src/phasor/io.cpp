#include "gridstudies/phasor/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/phasor/fault.hpp"

namespace gridstudies::phasor {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ParseError("unknown key '" + key + "' in " + where);
    }
}

double number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw ParseError(std::string("'") + key + "' must be a number");
    return obj.at(key).get<double>();
}

}  // namespace

PhasorNetwork parse_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
    require_keys(doc, {"nodes", "branches", "sources", "faults"}, "network");
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw ParseError("network needs a 'nodes' array");

    PhasorNetwork net;
    std::map<std::string, int> ids{{"ground", 0}};
    for (const auto& name : doc["nodes"]) {
        if (!name.is_string()) throw ParseError("node names must be strings");
        const auto s = name.get<std::string>();
        if (ids.count(s)) throw ParseError("duplicate node '" + s + "'");
        ids[s] = net.add_node(s);
    }
    auto node = [&](const json& obj, const char* key) {
        if (!obj.contains(key) || !obj.at(key).is_string()) {
            throw ParseError(std::string("missing node reference '") + key + "'");
        }
        const auto s = obj.at(key).get<std::string>();
        auto it = ids.find(s);
        if (it == ids.end()) throw ParseError("unknown node '" + s + "'");
        return it->second;
    };

    for (const auto& b : doc.value("branches", json::array())) {
        require_keys(b, {"from", "to", "r", "x", "shunt_g", "shunt_b"}, "branch");
        net.add_branch(Branch{node(b, "from"), node(b, "to"), Complex(number(b, "r", 0.0), number(b, "x", 0.0)),
                              Complex(number(b, "shunt_g", 0.0), number(b, "shunt_b", 0.0))});
    }
    for (const auto& s : doc.value("sources", json::array())) {
        require_keys(s, {"node", "emf_rms", "angle_deg", "r", "x"}, "source");
        const double angle = number(s, "angle_deg", 0.0) * std::numbers::pi / 180.0;
        net.add_source(Source{node(s, "node"), std::polar(number(s, "emf_rms", 0.0), angle),
                              Complex(number(s, "r", 0.0), number(s, "x", 0.0))});
    }
    for (const auto& f : doc.value("faults", json::array())) {
        require_keys(f, {"node", "to", "r"}, "fault");
        const int to = f.contains("to") ? node(f, "to") : 0;
        const double r = std::max(number(f, "r", 0.0), kBoltedResistance);
        net.add_branch(Branch{node(f, "node"), to, Complex(r, 0.0), Complex{}});
    }
    net.validate();
    return net;
}

PhasorNetwork read_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_network(buffer.str());
}

void write_solution_csv(const std::filesystem::path& path, const PhasorNetwork& net,
                        const PhasorSolution& sol) {
    std::vector<std::vector<std::string>> rows;
    for (int k = 1; k <= net.node_count(); ++k) {
        std::string name = net.node_name(k);
        std::string phase = "-";
        const auto dot = name.rfind('.');
        if (dot != std::string::npos && name.size() == dot + 2 &&
            (name.back() == 'A' || name.back() == 'B' || name.back() == 'C')) {
            phase = name.substr(dot + 1);
            name = name.substr(0, dot);
        }
        if (name.empty()) name = std::to_string(k);
        const Complex v = sol.voltage(k);
        rows.push_back({name, phase, csv::format(std::abs(v), 12),
                        csv::format(std::arg(v) * 180.0 / std::numbers::pi, 12)});
    }
    csv::write_table(path, {"node", "phase", "rms_volts", "angle_deg"}, rows);
}

}  // namespace gridstudies::phasor
