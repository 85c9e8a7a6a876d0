#pragma once

// Command results as one ordered tree, rendered as indented text, JSON or a
// flat path,value CSV. All three renderings print numbers identically
// (shortest round-trip form), so no precision is lost in any of them.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridhop/balance.hpp"
#include "gridhop/econ.hpp"
#include "gridhop/network.hpp"
#include "gridhop/security.hpp"
#include "gridhop/sizing.hpp"

namespace gridhop {

enum class ReportFormat { text, json, csv };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
    if (s == "text") return ReportFormat::text;
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    return std::nullopt;
}

struct Report {
    nlohmann::ordered_json tree = nlohmann::ordered_json::object();
};

namespace detail {

using Tree = nlohmann::ordered_json;

inline std::string scalar_text(const Tree& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline bool is_leaf(const Tree& v) { return !v.is_structured() || v.empty(); }

inline void render_text(const Tree& node, int indent, std::ostringstream& out) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [key, value] : node.items()) {
        if (is_leaf(value)) {
            out << pad << key << ": " << (value.is_structured() ? value.dump() : scalar_text(value)) << "\n";
        } else if (value.is_array() && std::all_of(value.begin(), value.end(), [](const Tree& v) { return !v.is_structured(); })) {
            out << pad << key << ": ";
            for (std::size_t i = 0; i < value.size(); ++i) out << (i ? ", " : "") << scalar_text(value[i]);
            out << "\n";
        } else if (value.is_array()) {
            out << pad << key << ":\n";
            for (const auto& item : value) {
                if (item.is_object()) {
                    out << pad << "  -\n";
                    render_text(item, indent + 4, out);
                } else {
                    out << pad << "  - " << (item.is_structured() ? item.dump() : scalar_text(item)) << "\n";
                }
            }
        } else {
            out << pad << key << ":\n";
            render_text(value, indent + 2, out);
        }
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void render_csv(const Tree& node, const std::string& path, std::ostringstream& out) {
    if (is_leaf(node)) {
        out << csv_field(path) << "," << csv_field(node.is_structured() ? node.dump() : scalar_text(node)) << "\n";
        return;
    }
    if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i) render_csv(node[i], path + "/" + std::to_string(i), out);
        return;
    }
    for (const auto& [key, value] : node.items()) render_csv(value, path.empty() ? key : path + "/" + key, out);
}

/// Reported numbers carry 12 significant digits. The search accumulates
/// rounding in the last few bits, and 1.6999999999999957 should read 1.7.
inline double snap(double x) {
    if (std::abs(x) < kTolerance) return 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline Tree snapped(Tree node) {
    if (node.is_number_float()) return snap(node.get<double>());
    if (node.is_structured())
        for (auto& child : node) child = snapped(std::move(child));
    return node;
}

/// JSON has no infinity; unbounded quantities become null.
inline Tree number(double x) { return std::isfinite(x) ? Tree(x) : Tree(nullptr); }

template <typename Map>
Tree number_map(const Map& m) {
    Tree out = Tree::object();
    for (const auto& [k, v] : m) out[k] = number(v);
    return out;
}

inline std::string_view to_string(ContingencyKind k) {
    return k == ContingencyKind::source_circuit ? "source-circuit" : "branch";
}

} // namespace detail

inline std::string render(const Report& report, ReportFormat format) {
    const auto tree = detail::snapped(report.tree);
    std::ostringstream out;
    switch (format) {
    case ReportFormat::json: return tree.dump(2) + "\n";
    case ReportFormat::csv:
        out << "path,value\n";
        detail::render_csv(tree, "", out);
        break;
    case ReportFormat::text: detail::render_text(tree, 0, out); break;
    }
    return out.str();
}

// --- builders ----------------------------------------------------------------

inline Report validation_report(const std::string& network, const ValidationReport& v) {
    Report r;
    r.tree["command"] = "validate";
    r.tree["network"] = network;
    r.tree["ok"] = v.ok();
    r.tree["violations"] = detail::Tree::array();
    for (const auto& x : v.violations)
        r.tree["violations"].push_back({{"code", x.code}, {"element", x.element}, {"message", x.message}});
    return r;
}

inline Report flows_report(const std::string& network, const std::string& state_label, const std::string& contingency,
                           const Network& net, const FlowSolution& sol) {
    Report r;
    auto& t = r.tree;
    t["command"] = "flows";
    t["network"] = network;
    t["state"] = state_label;
    if (!contingency.empty()) t["contingency"] = contingency;
    t["flows"] = detail::number_map(sol.flows);
    t["source_supply"] = detail::number_map(sol.source_supply);
    t["served_fraction"] = detail::number_map(sol.served_fraction);
    double unserved = 0.0;
    for (const auto& d : net.demands) {
        auto it = sol.served_fraction.find(d.id);
        unserved += d.magnitude * (1.0 - (it == sol.served_fraction.end() ? 0.0 : it->second));
    }
    t["unserved"] = detail::Tree(unserved);
    t["converter_injections"] = detail::Tree::object();
    for (const auto& [id, inj] : sol.converter_injections) t["converter_injections"][id] = inj;
    t["overloads"] = detail::Tree::array();
    for (const auto& o : thermal_violations(net, sol)) {
        t["overloads"].push_back({{"element", o.element},
                                  {"class", to_string(o.element_class)},
                                  {"flow", o.flow},
                                  {"rating", o.rating},
                                  {"overload", o.overload}});
    }
    return r;
}

/// Per-contingency plans. Deliberately names devices only by id, so two
/// networks whose devices behave identically yield identical reports.
inline Report n1_report(const std::string& network, const std::string& scenario, const Network& net,
                        const N1Analysis& a) {
    Report r;
    auto& t = r.tree;
    t["command"] = "n1";
    t["network"] = network;
    t["scenario"] = scenario;
    t["secure"] = a.secure();
    t["capacity_shortfall"] = a.capacity_shortfall;
    t["shortfall_before_reconfiguration"] = a.shortfall_before_reconfiguration;
    t["contingencies"] = detail::Tree::array();
    for (std::size_t i = 0; i < a.plans.size(); ++i) {
        const auto& c = a.contingencies[i];
        const auto& p = a.plans[i];
        detail::Tree e;
        e["element"] = c.element;
        e["kind"] = detail::to_string(c.kind);
        e["unserved_before_reconfiguration"] = a.unserved_before[i];
        e["unserved"] = p.unserved;
        e["switch_operations"] = p.switch_operations;
        e["toggled"] = p.toggled;
        e["converter_transfer"] = detail::number_map(p.converter_usage);
        detail::Tree curtailed = detail::Tree::object();
        for (const auto& [id, f] : p.served_fraction) {
            if (f < 1.0 - kTolerance) curtailed[id] = f;
        }
        e["curtailed_served_fraction"] = std::move(curtailed);
        if (p.unserved > kTolerance || p.total_converter_usage() > kTolerance) {
            try {
                const auto use = classify_use_case(net, c, p);
                e["use_case"] = to_string(use.tag);
                e["evidence"] = use.evidence;
            } catch (const Unclassifiable&) {
                e["use_case"] = "unclassified";
                e["evidence"] = detail::Tree::array();
            }
        }
        t["contingencies"].push_back(std::move(e));
    }
    return r;
}

inline Report firm_capacity_report(const std::string& network, const std::string& scenario,
                                   const std::vector<std::string>& scaled, const FirmCapacity& f) {
    Report r;
    auto& t = r.tree;
    t["command"] = "firm-capacity";
    t["network"] = network;
    t["scenario"] = scenario;
    t["scaled_demands"] = scaled.empty() ? detail::Tree("all") : detail::Tree(scaled);
    t["secure_at_zero"] = f.secure_at_zero;
    t["unbounded"] = f.unbounded;
    t["firm_capacity"] = detail::number(f.value);
    t["scale"] = detail::number(f.scale);
    return r;
}

inline detail::Tree sizing_tree(const SizingResult& s) {
    return {{"device", s.device},
            {"kind", to_string(s.kind)},
            {"replaces", s.replaces},
            {"required_rating", s.required_rating},
            {"residual_shortfall", s.residual_shortfall}};
}

inline Report size_report(const std::string& network, const std::string& scenario, const SizingResult& s) {
    Report r;
    r.tree["command"] = "size";
    r.tree["network"] = network;
    r.tree["scenario"] = scenario;
    const auto sized = sizing_tree(s);
    for (const auto& [k, v] : sized.items()) r.tree[k] = v;
    return r;
}

inline Report compare_report(const std::string& network, const std::string& scenario, const OptionComparison& cmp) {
    Report r;
    auto& t = r.tree;
    t["command"] = "compare";
    t["network"] = network;
    t["scenario"] = scenario;
    t["baseline"] = cmp.baseline;
    t["options"] = detail::Tree::array();
    bool multi = false;
    for (const auto& row : cmp.rows) {
        detail::Tree e{{"label", row.option.label}};
        const auto sized = sizing_tree(row.sizing);
        for (const auto& [k, v] : sized.items()) e[k] = v;
        e["ratio"] = row.ratio ? detail::Tree(*row.ratio) : detail::Tree(nullptr);
        e["direct_ratio"] = row.direct_ratio ? detail::Tree(*row.direct_ratio) : detail::Tree(nullptr);
        t["options"].push_back(std::move(e));
        multi = multi || row.option.replaces.size() > 1;
    }
    if (multi)
        t["note"] = "multi-terminal ratings are the maximum simultaneous transfer through the device; "
                    "the split between its ports is not sized";
    return r;
}

struct EconInputs {
    std::string currency = "$";
    std::optional<double> rate;
    std::optional<int> deferral_years;
    std::optional<int> horizon_years;
    std::optional<double> annual_benefit;
    std::optional<double> loss_reduction_mw;
    std::optional<double> price_per_mwh;
};

/// Evaluates whichever quantities the inputs determine; throws Error when
/// they determine none.
inline Report econ_report(const EconInputs& in) {
    Report r;
    auto& t = r.tree;
    t["command"] = "econ";
    t["currency"] = in.currency;
    if (in.rate) t["discount_rate"] = *in.rate;
    bool any = false;
    if (in.deferral_years) {
        if (!in.rate) throw Error("--deferral needs a discount rate");
        t["deferral_years"] = *in.deferral_years;
        t["deferral_cost_reduction_percent"] = econ::deferral_cost_reduction(*in.deferral_years, *in.rate);
        any = true;
    }
    std::optional<double> benefit = in.annual_benefit;
    if (in.loss_reduction_mw || in.price_per_mwh) {
        if (!in.loss_reduction_mw || !in.price_per_mwh) throw Error("loss reduction needs both --loss-mw and --price");
        const double energy = econ::annual_energy_mwh(*in.loss_reduction_mw);
        t["loss_reduction_mw"] = *in.loss_reduction_mw;
        t["price_per_mwh"] = *in.price_per_mwh;
        t["annual_energy_mwh"] = energy;
        t["annual_energy_mwh_rounded"] = std::round(energy);
        benefit = econ::loss_reduction_annual_benefit(*in.loss_reduction_mw, *in.price_per_mwh);
        any = true;
    }
    if (benefit) {
        t["annual_benefit"] = *benefit;
        if (in.horizon_years) {
            if (!in.rate) throw Error("lifetime benefit needs a discount rate");
            t["horizon_years"] = *in.horizon_years;
            t["lifetime_operational_benefit"] = econ::lifetime_operational_benefit(*benefit, *in.horizon_years, *in.rate);
        }
        any = true;
    }
    if (!any) throw Error("nothing to evaluate: give --deferral, --benefit or --loss-mw/--price");
    return r;
}

} // namespace gridhop
