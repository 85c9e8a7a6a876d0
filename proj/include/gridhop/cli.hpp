#pragma once

// Command surface of the gridhop tool. run_command never throws: failures
// are reported on `err` and mapped to exit codes
//   0 success, 1 analysis infeasible / shortfall under --assert-secure,
//   2 input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridhop/document.hpp"
#include "gridhop/fixtures.hpp"
#include "gridhop/report.hpp"

namespace gridhop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysis = 1;
inline constexpr int kExitInput = 2;

namespace detail {

/// Thrown for bad files or arguments; exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Writes via a sibling temporary and rename, so readers never see a
/// partial file.
inline void write_atomically(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + path.string() + "'");
        out << text;
        if (!out.flush()) throw InputError("cannot write '" + path.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw InputError("cannot write '" + path.string() + "'");
    }
}

struct Loaded {
    NetworkDocument doc;
    std::string name;
    Network net;
};

inline Loaded load(const std::string& path, const std::string& scenario) {
    Loaded l;
    l.doc = parse_document(read_text(path));
    l.name = l.doc.name.empty() ? std::filesystem::path(path).stem().string() : l.doc.name;
    try {
        l.net = scenario_network(l.doc, scenario);
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    return l;
}

inline std::vector<std::string> split_ids(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::stringstream ss(item);
        for (std::string id; std::getline(ss, id, ',');) {
            if (!id.empty()) out.push_back(id);
        }
    }
    return out;
}

inline Contingency find_contingency(const Network& net, const std::string& element) {
    for (const auto& c : enumerate_contingencies(net)) {
        if (c.element == element) return c;
    }
    throw InputError("'" + element + "' is not a grid infeed or incoming branch");
}

} // namespace detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interconnected radial distribution network planning: N-1 security, HOP/SOP sizing, economics",
                 "gridhop"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string format_name = "text";
    std::string out_path;
    std::string file;
    std::string scenario;
    auto common = [&](CLI::App* sub, bool needs_file) {
        sub->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"text", "json", "csv"}));
        sub->add_option("--out", out_path, "Write the report to this path instead of stdout");
        if (needs_file) {
            sub->add_option("file", file, "Network document")->required();
            sub->add_option("--scenario", scenario, "Named demand scenario from the document");
        }
    };

    auto* validate = app.add_subcommand("validate", "Check a network document for structural and topological defects");
    common(validate, true);

    auto* flows = app.add_subcommand("flows", "Branch flows for the normal state or the best post-fault plan");
    common(flows, true);
    std::string state_name = "normal";
    std::string contingency;
    flows->add_option("--state", state_name, "normal or best")->check(CLI::IsMember({"normal", "best"}));
    flows->add_option("--contingency", contingency, "Outaged source or incoming branch id");

    auto* n1 = app.add_subcommand("n1", "N-1 contingency analysis with post-fault reconfiguration");
    common(n1, true);
    bool assert_secure = false;
    n1->add_flag("--assert-secure", assert_secure, "Exit 1 when any contingency leaves demand unserved");

    auto* firm = app.add_subcommand("firm-capacity", "Largest demand scaling with no N-1 shortfall");
    common(firm, true);
    std::vector<std::string> scale_raw;
    firm->add_option("--scale", scale_raw, "Demand ids to scale (default: all); comma separated");

    auto* size = app.add_subcommand("size", "Minimum converter rating at a placement that removes the N-1 shortfall");
    common(size, true);
    std::vector<std::string> device_raw;
    std::string kind_name;
    size->add_option("--device", device_raw, "Replaced nop/ncp id(s); several nops give a multi-terminal sop")->required();
    size->add_option("--kind", kind_name, "hop1, hop2 or sop")->required()->check(CLI::IsMember({"hop1", "hop2", "sop"}));

    auto* compare = app.add_subcommand("compare", "Size every option listed in the document");
    common(compare, true);
    std::string baseline;
    compare->add_option("--baseline", baseline, "Option label used as the ratio reference (default: first sop)");

    auto* econ_cmd = app.add_subcommand("econ", "Deferral value and lifetime operational benefit");
    common(econ_cmd, false);
    econ_cmd->add_option("file", file, "Network document supplying default parameters");
    std::optional<double> rate;
    std::optional<int> deferral;
    std::optional<int> years;
    std::optional<double> benefit;
    std::optional<double> loss_mw;
    std::optional<double> price;
    std::optional<std::string> currency;
    econ_cmd->add_option("--rate", rate, "Discount rate per year, e.g. 0.0325");
    econ_cmd->add_option("--deferral", deferral, "Years of reinforcement deferral")->check(CLI::NonNegativeNumber);
    econ_cmd->add_option("--years", years, "Benefit horizon in years")->check(CLI::NonNegativeNumber);
    econ_cmd->add_option("--benefit", benefit, "Annual benefit");
    econ_cmd->add_option("--loss-mw", loss_mw, "Average loss reduction in MW")->check(CLI::NonNegativeNumber);
    econ_cmd->add_option("--price", price, "Energy price per MWh")->check(CLI::NonNegativeNumber);
    econ_cmd->add_option("--currency", currency, "Currency label");

    auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the bundled networks as documents");
    common(fixtures_cmd, false);
    std::string fixture_dir;
    fixtures_cmd->add_option("--dir", fixture_dir, "Output directory (default: $GRIDHOP_FIXTURE_DIR or .)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    int status = kExitOk;
    try {
        Report report;
        if (validate->parsed()) {
            const auto l = detail::load(file, scenario);
            const auto v = validate_network(l.net);
            report = validation_report(l.name, v);
            if (!v.ok()) status = kExitAnalysis;
        } else if (flows->parsed()) {
            const auto l = detail::load(file, scenario);
            if (state_name == "best" && contingency.empty()) throw detail::InputError("--state best needs --contingency");
            Network net = l.net;
            SwitchState state = normal_state(net);
            ServedFractions served;
            if (!contingency.empty()) {
                const auto c = detail::find_contingency(net, contingency);
                if (state_name == "best") {
                    const auto plan = best_reconfiguration(net, c);
                    state = plan.state;
                    served = plan.served_fraction;
                }
                net = apply_contingency(net, c);
            }
            if (!is_radial(net, state)) throw detail::InputError("the requested switch state is not radial");
            report = flows_report(l.name, state_name, contingency, net, solve_flows(net, state, served));
        } else if (n1->parsed()) {
            const auto l = detail::load(file, scenario);
            const auto a = analyze_n1(l.net);
            report = n1_report(l.name, scenario, l.net, a);
            if (assert_secure && !a.secure()) status = kExitAnalysis;
        } else if (firm->parsed()) {
            const auto l = detail::load(file, scenario);
            const auto ids = detail::split_ids(scale_raw);
            for (const auto& id : ids) {
                if (!l.net.find_demand(id)) throw detail::InputError("unknown demand '" + id + "'");
            }
            const auto f = firm_capacity(l.net, ids);
            report = firm_capacity_report(l.name, scenario, ids, f);
            if (!f.secure_at_zero) status = kExitAnalysis;
        } else if (size->parsed()) {
            const auto l = detail::load(file, scenario);
            const auto kind = *parse_device_kind(kind_name);
            const auto s = size_device(l.net, Placement{detail::split_ids(device_raw)}, kind);
            report = size_report(l.name, scenario, s);
            if (s.residual_shortfall > kTolerance) status = kExitAnalysis;
        } else if (compare->parsed()) {
            const auto l = detail::load(file, scenario);
            if (l.doc.options.empty()) throw detail::InputError("document lists no options");
            report = compare_report(l.name, scenario, compare_options(l.net, l.doc.options, baseline));
        } else if (econ_cmd->parsed()) {
            EconInputs in;
            if (!file.empty()) {
                const auto doc = parse_document(detail::read_text(file));
                if (doc.econ) {
                    in.currency = doc.econ->currency;
                    in.rate = doc.econ->discount_rate;
                    in.deferral_years = doc.econ->deferral_years;
                    in.horizon_years = doc.econ->horizon_years;
                    in.annual_benefit = doc.econ->annual_benefit;
                }
            }
            if (currency) in.currency = *currency;
            if (rate) in.rate = rate;
            if (deferral) in.deferral_years = deferral;
            if (years) in.horizon_years = years;
            if (benefit) in.annual_benefit = benefit;
            if (loss_mw) in.loss_reduction_mw = loss_mw;
            if (price) in.price_per_mwh = price;
            try {
                report = econ_report(in);
            } catch (const InvalidRate&) {
                throw;
            } catch (const Error& e) {
                throw detail::InputError(e.what());
            }
        } else if (fixtures_cmd->parsed()) {
            if (fixture_dir.empty()) {
                const char* env = std::getenv("GRIDHOP_FIXTURE_DIR");
                fixture_dir = env && *env ? env : ".";
            }
            std::error_code ec;
            std::filesystem::create_directories(fixture_dir, ec);
            if (ec) throw detail::InputError("cannot create directory '" + fixture_dir + "'");
            report.tree["command"] = "fixtures";
            report.tree["directory"] = fixture_dir;
            report.tree["written"] = nlohmann::ordered_json::array();
            for (const auto& [name, doc] : fixtures::all()) {
                const auto path = std::filesystem::path(fixture_dir) / (name + ".json");
                detail::write_atomically(path, emit_document(doc));
                report.tree["written"].push_back(path.string());
            }
        }

        const std::string text = render(report, *parse_report_format(format_name));
        if (out_path.empty()) {
            out << text;
        } else {
            detail::write_atomically(out_path, text);
        }
        return status;
    } catch (const DocumentError& e) {
        err << "error: " << e.what() << "\n";
        for (const auto& issue : e.issues()) err << "  " << issue.location << ": " << issue.message << "\n";
        return kExitInput;
    } catch (const Infeasible& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

} // namespace gridhop
