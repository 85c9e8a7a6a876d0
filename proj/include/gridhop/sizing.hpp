#pragma once

// Converter sizing for hybrid and soft open points, option comparison and
// counterfactual use-case classification.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridhop/errors.hpp"
#include "gridhop/network.hpp"
#include "gridhop/security.hpp"

namespace gridhop {

/// Existing switch(es) a new converter device replaces. One id gives a
/// two-terminal device; several nops sharing one bus give a multi-terminal
/// sop around that bus.
struct Placement {
    std::vector<std::string> replaces;
};

struct SizingResult {
    std::vector<std::string> replaces;
    std::string device;
    DeviceKind kind = DeviceKind::sop;
    double required_rating = 0.0;
    double residual_shortfall = 0.0;
};

/// Id given to the device installed at `placement`.
inline std::string placement_device_id(const Placement& placement) {
    std::string id;
    for (const auto& r : placement.replaces) id += (id.empty() ? "" : "+") + r;
    return id;
}

inline Network install_device(const Network& net, const Placement& placement, DeviceKind kind, double rating) {
    const auto& ids = placement.replaces;
    if (ids.empty()) throw IncompatiblePlacement("placement names no device");
    if (kind == DeviceKind::nop || kind == DeviceKind::ncp)
        throw IncompatiblePlacement("placement kind must carry a converter");

    std::vector<const SwitchableDevice*> replaced;
    for (const auto& id : ids) {
        const auto* d = net.find_device(id);
        if (!d) throw IncompatiblePlacement("unknown device '" + id + "'");
        if (d->multi_terminal()) throw IncompatiblePlacement("device '" + id + "' is already multi-terminal");
        replaced.push_back(d);
    }

    SwitchableDevice installed;
    installed.id = placement_device_id(placement);
    installed.kind = kind;
    installed.converter_rating = rating;
    installed.normal_state = kind == DeviceKind::hop2 ? SwitchPosition::closed : SwitchPosition::open;

    if (replaced.size() == 1) {
        const auto& d = *replaced.front();
        const DeviceKind needed = kind == DeviceKind::hop2 ? DeviceKind::ncp : DeviceKind::nop;
        if (d.kind != needed)
            throw IncompatiblePlacement(std::string(to_string(kind)) + " must replace a " +
                                        std::string(to_string(needed)) + ", '" + d.id + "' is a " +
                                        std::string(to_string(d.kind)));
        installed.terminals = d.terminals;
    } else {
        if (kind != DeviceKind::sop) throw IncompatiblePlacement("only a sop can span several switches");
        std::set<std::string> common(replaced.front()->terminals.begin(), replaced.front()->terminals.end());
        for (const auto* d : replaced) {
            if (d->kind != DeviceKind::nop) throw IncompatiblePlacement("multi-terminal sop must replace nops, '" + d->id + "' is not");
            std::set<std::string> keep;
            for (const auto& t : d->terminals) {
                if (common.count(t)) keep.insert(t);
            }
            common = std::move(keep);
        }
        if (common.size() != 1) throw IncompatiblePlacement("replaced nops must share exactly one bus");
        const std::string hub = *common.begin();
        installed.terminals.push_back(hub);
        for (const auto* d : replaced) installed.terminals.push_back(d->from_bus() == hub ? d->to_bus() : d->from_bus());
    }

    Network out = net;
    const std::set<std::string> gone(ids.begin(), ids.end());
    auto first = std::find_if(out.devices.begin(), out.devices.end(), [&](const auto& d) { return gone.count(d.id) > 0; });
    const auto position = first - out.devices.begin();
    std::erase_if(out.devices, [&](const SwitchableDevice& d) { return gone.count(d.id) > 0; });
    out.devices.insert(out.devices.begin() + position, std::move(installed));
    return out;
}

/// Smallest converter rating at the placement that removes the N-1
/// shortfall, found by bisection. When no rating suffices the result is the
/// rating beyond which the shortfall stops falling, with the remaining
/// shortfall reported.
inline SizingResult size_device(const Network& net, const Placement& placement, DeviceKind kind) {
    SizingResult out{placement.replaces, placement_device_id(placement), kind, 0.0, 0.0};
    auto shortfall = [&](double rating) { return capacity_shortfall(install_device(net, placement, kind, rating)); };

    const double upper = net.total_demand();
    const double at_zero = shortfall(0.0);
    if (at_zero <= kTolerance || upper <= 0.0) {
        out.residual_shortfall = at_zero <= kTolerance ? 0.0 : at_zero;
        return out;
    }
    const double floor = shortfall(upper);
    const double target = floor <= kTolerance ? kTolerance : floor + kTolerance;
    double lo = 0.0;
    double hi = upper;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (shortfall(mid) <= target ? hi : lo) = mid;
    }
    // Prefer the shortest decimal within a few bracket widths above the
    // threshold; the shortfall tolerance already blurs that much.
    out.required_rating = hi;
    for (int digits = 0; digits <= 9; ++digits) {
        const double scale = std::pow(10.0, digits);
        const double candidate = std::ceil(lo * scale) / scale;
        if (candidate > lo && candidate <= hi + 1e-8 && shortfall(candidate) <= target) {
            out.required_rating = candidate;
            break;
        }
    }
    out.residual_shortfall = floor <= kTolerance ? 0.0 : floor;
    return out;
}

/// Converter rating of a device carrying only the headroom h, relative to
/// one that must also carry the transferred demand: h / (h + D).
inline double rating_ratio(double headroom, double transferred_demand) {
    if (headroom < 0.0 || transferred_demand < 0.0) throw DegenerateInput("rating ratio inputs must be non-negative");
    if (headroom + transferred_demand <= 0.0) throw DegenerateInput("rating ratio undefined for h = D = 0");
    return headroom / (headroom + transferred_demand);
}

struct OptionSpec {
    std::string label;
    DeviceKind kind = DeviceKind::sop;
    std::vector<std::string> replaces;

    bool operator==(const OptionSpec&) const = default;
};

struct OptionRow {
    OptionSpec option;
    SizingResult sizing;
    std::optional<double> ratio;        // via rating_ratio against the baseline
    std::optional<double> direct_ratio; // rating / baseline rating
};

struct OptionComparison {
    std::string baseline; // label of the sop option used as reference
    std::vector<OptionRow> rows;
};

/// Sizes every option and expresses each rating relative to the first sop
/// option (or `baseline_label`).
inline OptionComparison compare_options(const Network& net, const std::vector<OptionSpec>& options,
                                        const std::string& baseline_label = {}) {
    OptionComparison out;
    for (const auto& opt : options) {
        out.rows.push_back({opt, size_device(net, Placement{opt.replaces}, opt.kind), std::nullopt, std::nullopt});
    }
    const OptionRow* base = nullptr;
    for (const auto& row : out.rows) {
        const bool match = baseline_label.empty() ? row.option.kind == DeviceKind::sop : row.option.label == baseline_label;
        if (match) {
            base = &row;
            break;
        }
    }
    if (!base) {
        if (!baseline_label.empty()) throw Error("unknown baseline option '" + baseline_label + "'");
        return out;
    }
    out.baseline = base->option.label;
    const double reference = base->sizing.required_rating;
    if (reference <= kTolerance) return out;
    for (auto& row : out.rows) {
        const double rating = row.sizing.required_rating;
        row.direct_ratio = rating / reference;
        row.ratio = rating <= reference ? rating_ratio(rating, reference - rating) : *row.direct_ratio;
    }
    return out;
}

// --- use-case classification -------------------------------------------------

enum class UseCaseTag { radiality_lumped_load, fault_level_constrained, multi_terminal_tee };

inline std::string_view to_string(UseCaseTag t) {
    switch (t) {
    case UseCaseTag::radiality_lumped_load: return "radiality-lumped-load";
    case UseCaseTag::fault_level_constrained: return "fault-level-constrained";
    case UseCaseTag::multi_terminal_tee: return "multi-terminal-tee";
    }
    return "?";
}

struct UseCase {
    UseCaseTag tag = UseCaseTag::radiality_lumped_load;
    std::vector<std::string> evidence;
};

/// Why a contingency needs a converter, found by relaxing one constraint
/// class at a time and re-running the search:
///  - fault-level limits removed;
///  - each two-terminal switch paired with a free, unlimited converter.
/// Evidence lists the relaxations that improved (unserved, converter usage).
inline UseCase classify_use_case(const Network& net, const Contingency& c, const ReconfigurationPlan& plan) {
    const double usage = plan.total_converter_usage();
    if (plan.unserved <= kTolerance && usage <= kTolerance)
        throw Unclassifiable("plan has no unserved demand and no converter usage");

    auto improves = [&](const ReconfigurationPlan& p) {
        if (p.unserved < plan.unserved - kTolerance) return true;
        return std::abs(p.unserved - plan.unserved) <= kTolerance && p.total_converter_usage() < usage - kTolerance;
    };

    SearchOptions no_fault_limits;
    no_fault_limits.enforce_fault_levels = false;
    const auto relaxed = best_reconfiguration(net, c, no_fault_limits);
    if (improves(relaxed)) {
        UseCase out{UseCaseTag::fault_level_constrained, {}};
        for (const auto& v : fault_level_violations(apply_contingency(net, c), relaxed.state))
            out.evidence.push_back("fault-level:" + v.bus);
        return out;
    }

    std::vector<std::string> binding;
    std::vector<std::string> tee;
    const double unlimited = 2.0 * net.total_demand() + 1.0;
    for (const auto* d : detail::switchable_devices(net)) {
        Network trial = net;
        SwitchableDevice shadow{"~free:" + d->id, DeviceKind::sop, d->terminals, SwitchPosition::open, unlimited, {}};
        trial.devices.push_back(shadow);
        SearchOptions options;
        options.free_converters.insert(shadow.id);
        if (!improves(best_reconfiguration(trial, c, options))) continue;
        binding.push_back(d->id);
        const bool at_tee = std::any_of(d->terminals.begin(), d->terminals.end(), [&](const std::string& b) {
            const auto* bus = net.find_bus(b);
            return bus && bus->kind == BusKind::tee_point;
        });
        if (at_tee) tee.push_back(d->id);
    }
    if (binding.empty()) throw Unclassifiable("no relaxation changes the outcome for contingency " + c.element);
    if (!tee.empty()) return {UseCaseTag::multi_terminal_tee, tee};
    return {UseCaseTag::radiality_lumped_load, binding};
}

} // namespace gridhop
