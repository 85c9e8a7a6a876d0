#pragma once

// Network interchange document: strict JSON with schema_version "1".
// Units are MVA, years and fractional rates throughout.

#include <algorithm>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridhop/econ.hpp"
#include "gridhop/errors.hpp"
#include "gridhop/network.hpp"
#include "gridhop/sizing.hpp"

namespace gridhop {

inline constexpr std::string_view kSchemaVersion = "1";

struct NetworkDocument {
    std::string schema_version{kSchemaVersion};
    std::string name;
    std::string description;
    Network network;
    std::map<std::string, std::map<std::string, double>> demand_scenarios;
    std::optional<econ::EconParams> econ;
    std::vector<OptionSpec> options;

    bool operator==(const NetworkDocument&) const = default;
};

namespace detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

class DocumentReader {
public:
    std::vector<DocumentIssue> issues;

    void fail(const std::string& where, std::string message) { issues.push_back({where.empty() ? "/" : where, std::move(message)}); }

    /// Reports missing required keys and unknown keys; true if `j` is an object.
    bool keys(const Json& j, const std::string& where, std::initializer_list<std::string_view> required,
              std::initializer_list<std::string_view> optional) {
        if (!j.is_object()) {
            fail(where, "expected an object");
            return false;
        }
        for (auto key : required) {
            if (!j.contains(key)) fail(where, "missing required field '" + std::string(key) + "'");
        }
        for (const auto& [key, value] : j.items()) {
            const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                               std::find(optional.begin(), optional.end(), key) != optional.end();
            if (!known) fail(where + "/" + key, "unknown field");
        }
        return true;
    }

    std::string string(const Json& j, std::string_view key, const std::string& where, std::string fallback = {}) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(std::string(key));
        if (!v.is_string()) {
            fail(where + "/" + std::string(key), "expected a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    double number(const Json& j, std::string_view key, const std::string& where, double fallback = 0.0) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(std::string(key));
        if (!v.is_number()) {
            fail(where + "/" + std::string(key), "expected a number");
            return fallback;
        }
        return v.get<double>();
    }

    int integer(const Json& j, std::string_view key, const std::string& where, int fallback = 0) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(std::string(key));
        if (!v.is_number_integer()) {
            fail(where + "/" + std::string(key), "expected an integer");
            return fallback;
        }
        return v.get<int>();
    }

    bool boolean(const Json& j, std::string_view key, const std::string& where, bool fallback) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(std::string(key));
        if (!v.is_boolean()) {
            fail(where + "/" + std::string(key), "expected true or false");
            return fallback;
        }
        return v.get<bool>();
    }

    template <typename Enum, typename Parser>
    Enum enumeration(const Json& j, std::string_view key, const std::string& where, Parser parse, Enum fallback) {
        const auto text = string(j, key, where);
        if (!j.contains(key) || !j.at(std::string(key)).is_string()) return fallback;
        if (auto value = parse(text)) return *value;
        fail(where + "/" + std::string(key), "unknown value '" + text + "'");
        return fallback;
    }

    std::vector<std::string> strings(const Json& j, std::string_view key, const std::string& where) {
        std::vector<std::string> out;
        if (!j.contains(key)) return out;
        const auto& v = j.at(std::string(key));
        const std::string at = where + "/" + std::string(key);
        if (!v.is_array()) {
            fail(at, "expected an array of strings");
            return out;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].is_string()) {
                out.push_back(v[i].get<std::string>());
            } else {
                fail(at + "/" + std::to_string(i), "expected a string");
            }
        }
        return out;
    }

    /// Iterates an array field, calling `read(element, pointer)`.
    template <typename Fn>
    void each(const Json& j, std::string_view key, const std::string& where, Fn read) {
        if (!j.contains(key)) return;
        const auto& v = j.at(std::string(key));
        const std::string at = where + "/" + std::string(key);
        if (!v.is_array()) {
            fail(at, "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) read(v[i], at + "/" + std::to_string(i));
    }
};

inline std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline Network read_network(DocumentReader& r, const Json& j, const std::string& where) {
    Network net;
    if (!r.keys(j, where, {"buses", "sources", "branches", "demands", "devices"}, {})) return net;

    r.each(j, "buses", where, [&](const Json& e, const std::string& at) {
        if (!r.keys(e, at, {"id", "kind"}, {"fault_level_limit", "provenance"})) return;
        Bus b;
        b.id = r.string(e, "id", at);
        b.kind = r.enumeration(e, "kind", at, parse_bus_kind, BusKind::feeder_node);
        if (e.contains("fault_level_limit")) b.fault_level_limit = r.number(e, "fault_level_limit", at);
        b.provenance = r.string(e, "provenance", at);
        net.buses.push_back(std::move(b));
    });
    r.each(j, "sources", where, [&](const Json& e, const std::string& at) {
        if (!r.keys(e, at, {"id", "bus", "capacity", "fault_contribution", "kind"}, {"circuits", "provenance"})) return;
        Source s;
        s.id = r.string(e, "id", at);
        s.bus = r.string(e, "bus", at);
        s.capacity = r.number(e, "capacity", at);
        s.circuits = r.integer(e, "circuits", at, 1);
        s.fault_contribution = r.number(e, "fault_contribution", at);
        s.kind = r.enumeration(e, "kind", at, parse_source_kind, SourceKind::grid_infeed);
        s.provenance = r.string(e, "provenance", at);
        net.sources.push_back(std::move(s));
    });
    r.each(j, "branches", where, [&](const Json& e, const std::string& at) {
        if (!r.keys(e, at, {"id", "from_bus", "to_bus", "rating"}, {"in_service", "incoming", "provenance"})) return;
        Branch b;
        b.id = r.string(e, "id", at);
        b.from_bus = r.string(e, "from_bus", at);
        b.to_bus = r.string(e, "to_bus", at);
        b.rating = r.number(e, "rating", at);
        b.in_service = r.boolean(e, "in_service", at, true);
        b.incoming = r.boolean(e, "incoming", at, false);
        b.provenance = r.string(e, "provenance", at);
        net.branches.push_back(std::move(b));
    });
    r.each(j, "demands", where, [&](const Json& e, const std::string& at) {
        if (!r.keys(e, at, {"id", "bus", "magnitude"}, {"provenance"})) return;
        Demand d;
        d.id = r.string(e, "id", at);
        d.bus = r.string(e, "bus", at);
        d.magnitude = r.number(e, "magnitude", at);
        d.provenance = r.string(e, "provenance", at);
        net.demands.push_back(std::move(d));
    });
    r.each(j, "devices", where, [&](const Json& e, const std::string& at) {
        if (!r.keys(e, at, {"id", "kind", "normal_state"},
                    {"from_bus", "to_bus", "terminals", "converter_rating", "provenance"}))
            return;
        SwitchableDevice d;
        d.id = r.string(e, "id", at);
        d.kind = r.enumeration(e, "kind", at, parse_device_kind, DeviceKind::nop);
        d.normal_state = r.enumeration(e, "normal_state", at, parse_switch_position, SwitchPosition::open);
        d.converter_rating = r.number(e, "converter_rating", at);
        d.provenance = r.string(e, "provenance", at);
        const bool pair = e.contains("from_bus") || e.contains("to_bus");
        if (pair && e.contains("terminals")) {
            r.fail(at, "give either from_bus/to_bus or terminals, not both");
        } else if (e.contains("terminals")) {
            d.terminals = r.strings(e, "terminals", at);
            if (d.terminals.size() < 3) r.fail(at + "/terminals", "terminals lists three or more buses; use from_bus/to_bus for two");
        } else {
            if (!e.contains("from_bus")) r.fail(at, "missing required field 'from_bus'");
            if (!e.contains("to_bus")) r.fail(at, "missing required field 'to_bus'");
            d.terminals = {r.string(e, "from_bus", at), r.string(e, "to_bus", at)};
        }
        net.devices.push_back(std::move(d));
    });
    return net;
}

inline void check_references(const NetworkDocument& doc, std::vector<DocumentIssue>& issues) {
    const auto& net = doc.network;
    std::set<std::string> buses;
    for (const auto& b : net.buses) buses.insert(b.id);
    auto bus = [&](const std::string& id, const std::string& at) {
        if (!buses.count(id)) issues.push_back({at, "unknown bus '" + id + "'"});
    };
    for (std::size_t i = 0; i < net.sources.size(); ++i) bus(net.sources[i].bus, "/network/sources/" + std::to_string(i) + "/bus");
    for (std::size_t i = 0; i < net.branches.size(); ++i) {
        bus(net.branches[i].from_bus, "/network/branches/" + std::to_string(i) + "/from_bus");
        bus(net.branches[i].to_bus, "/network/branches/" + std::to_string(i) + "/to_bus");
    }
    for (std::size_t i = 0; i < net.demands.size(); ++i) bus(net.demands[i].bus, "/network/demands/" + std::to_string(i) + "/bus");
    for (std::size_t i = 0; i < net.devices.size(); ++i) {
        const auto& d = net.devices[i];
        const std::string at = "/network/devices/" + std::to_string(i);
        if (d.multi_terminal()) {
            for (std::size_t t = 0; t < d.terminals.size(); ++t) bus(d.terminals[t], at + "/terminals/" + std::to_string(t));
        } else if (d.terminals.size() == 2) {
            bus(d.terminals[0], at + "/from_bus");
            bus(d.terminals[1], at + "/to_bus");
        }
    }
    for (const auto& [name, values] : doc.demand_scenarios) {
        for (const auto& [id, v] : values) {
            if (!net.find_demand(id)) issues.push_back({"/demand_scenarios/" + name + "/" + id, "unknown demand '" + id + "'"});
        }
    }
    for (std::size_t i = 0; i < doc.options.size(); ++i) {
        const auto& r = doc.options[i].replaces;
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (!net.find_device(r[k]))
                issues.push_back({"/options/" + std::to_string(i) + "/replaces/" + std::to_string(k), "unknown device '" + r[k] + "'"});
        }
    }
}

} // namespace detail

/// Strict parse: syntax problems raise ParseError, shape problems
/// SchemaError, unresolved ids ReferenceError. Every error lists all the
/// issues found at that stage with their locations.
inline NetworkDocument parse_document(std::string_view text) {
    using detail::Json;
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError({{detail::line_column(text, e.byte), e.what()}});
    }

    detail::DocumentReader r;
    NetworkDocument doc;
    if (r.keys(root, "", {"schema_version", "network"}, {"name", "description", "demand_scenarios", "econ", "options"})) {
        doc.schema_version = r.string(root, "schema_version", "");
        if (root.contains("schema_version") && root["schema_version"].is_string() && doc.schema_version != kSchemaVersion)
            r.fail("/schema_version", "unsupported schema version '" + doc.schema_version + "'");
        doc.name = r.string(root, "name", "");
        doc.description = r.string(root, "description", "");
        if (root.contains("network")) doc.network = detail::read_network(r, root["network"], "/network");

        if (root.contains("demand_scenarios")) {
            const auto& scenarios = root["demand_scenarios"];
            if (!scenarios.is_object()) {
                r.fail("/demand_scenarios", "expected an object");
            } else {
                for (const auto& [name, values] : scenarios.items()) {
                    const std::string at = "/demand_scenarios/" + name;
                    if (!values.is_object()) {
                        r.fail(at, "expected an object of demand magnitudes");
                        continue;
                    }
                    auto& out = doc.demand_scenarios[name];
                    for (const auto& [id, v] : values.items()) out[id] = r.number(values, id, at);
                }
            }
        }
        if (root.contains("econ")) {
            const auto& e = root["econ"];
            if (r.keys(e, "/econ", {"discount_rate", "horizon_years", "annual_benefit", "deferral_years"}, {"currency"})) {
                econ::EconParams p;
                p.discount_rate = r.number(e, "discount_rate", "/econ");
                p.horizon_years = r.integer(e, "horizon_years", "/econ");
                p.annual_benefit = r.number(e, "annual_benefit", "/econ");
                p.deferral_years = r.integer(e, "deferral_years", "/econ");
                p.currency = r.string(e, "currency", "/econ", "$");
                doc.econ = p;
            }
        }
        r.each(root, "options", "", [&](const Json& e, const std::string& at) {
            if (!r.keys(e, at, {"label", "kind", "replaces"}, {})) return;
            OptionSpec o;
            o.label = r.string(e, "label", at);
            o.kind = r.enumeration(e, "kind", at, parse_device_kind, DeviceKind::sop);
            o.replaces = r.strings(e, "replaces", at);
            doc.options.push_back(std::move(o));
        });
    }
    if (!r.issues.empty()) throw SchemaError(std::move(r.issues));

    std::vector<DocumentIssue> refs;
    detail::check_references(doc, refs);
    if (!refs.empty()) throw ReferenceError(std::move(refs));
    return doc;
}

inline nlohmann::ordered_json network_to_json(const Network& net) {
    using detail::OrderedJson;
    OrderedJson j;
    j["buses"] = OrderedJson::array();
    for (const auto& b : net.buses) {
        OrderedJson e{{"id", b.id}, {"kind", to_string(b.kind)}};
        if (b.fault_level_limit) e["fault_level_limit"] = *b.fault_level_limit;
        if (!b.provenance.empty()) e["provenance"] = b.provenance;
        j["buses"].push_back(std::move(e));
    }
    j["sources"] = OrderedJson::array();
    for (const auto& s : net.sources) {
        OrderedJson e{{"id", s.id}, {"bus", s.bus}, {"kind", to_string(s.kind)}, {"capacity", s.capacity}};
        if (s.circuits != 1) e["circuits"] = s.circuits;
        e["fault_contribution"] = s.fault_contribution;
        if (!s.provenance.empty()) e["provenance"] = s.provenance;
        j["sources"].push_back(std::move(e));
    }
    j["branches"] = OrderedJson::array();
    for (const auto& b : net.branches) {
        OrderedJson e{{"id", b.id}, {"from_bus", b.from_bus}, {"to_bus", b.to_bus}, {"rating", b.rating}};
        if (!b.in_service) e["in_service"] = false;
        if (b.incoming) e["incoming"] = true;
        if (!b.provenance.empty()) e["provenance"] = b.provenance;
        j["branches"].push_back(std::move(e));
    }
    j["demands"] = OrderedJson::array();
    for (const auto& d : net.demands) {
        OrderedJson e{{"id", d.id}, {"bus", d.bus}, {"magnitude", d.magnitude}};
        if (!d.provenance.empty()) e["provenance"] = d.provenance;
        j["demands"].push_back(std::move(e));
    }
    j["devices"] = OrderedJson::array();
    for (const auto& d : net.devices) {
        OrderedJson e{{"id", d.id}, {"kind", to_string(d.kind)}};
        if (d.terminals.size() == 2) {
            e["from_bus"] = d.terminals[0];
            e["to_bus"] = d.terminals[1];
        } else {
            e["terminals"] = d.terminals;
        }
        e["normal_state"] = to_string(d.normal_state);
        if (d.converter_rating != 0.0) e["converter_rating"] = d.converter_rating;
        if (!d.provenance.empty()) e["provenance"] = d.provenance;
        j["devices"].push_back(std::move(e));
    }
    return j;
}

/// Canonical text form; parse_document(emit_document(d)) == d.
inline std::string emit_document(const NetworkDocument& doc) {
    using detail::OrderedJson;
    OrderedJson j;
    j["schema_version"] = doc.schema_version;
    if (!doc.name.empty()) j["name"] = doc.name;
    if (!doc.description.empty()) j["description"] = doc.description;
    j["network"] = network_to_json(doc.network);
    if (!doc.demand_scenarios.empty()) {
        OrderedJson scenarios = OrderedJson::object();
        for (const auto& [name, values] : doc.demand_scenarios) {
            OrderedJson v = OrderedJson::object();
            for (const auto& [id, x] : values) v[id] = x;
            scenarios[name] = std::move(v);
        }
        j["demand_scenarios"] = std::move(scenarios);
    }
    if (doc.econ) {
        j["econ"] = OrderedJson{{"discount_rate", doc.econ->discount_rate},
                                {"horizon_years", doc.econ->horizon_years},
                                {"annual_benefit", doc.econ->annual_benefit},
                                {"deferral_years", doc.econ->deferral_years},
                                {"currency", doc.econ->currency}};
    }
    if (!doc.options.empty()) {
        j["options"] = OrderedJson::array();
        for (const auto& o : doc.options)
            j["options"].push_back(OrderedJson{{"label", o.label}, {"kind", to_string(o.kind)}, {"replaces", o.replaces}});
    }
    return j.dump(2) + "\n";
}

/// The document's network with a named demand scenario applied (empty name:
/// base magnitudes).
inline Network scenario_network(const NetworkDocument& doc, const std::string& scenario) {
    if (scenario.empty()) return doc.network;
    auto it = doc.demand_scenarios.find(scenario);
    if (it == doc.demand_scenarios.end()) throw Error("unknown demand scenario '" + scenario + "'");
    return apply_scenario(doc.network, it->second);
}

} // namespace gridhop
