#pragma once

// N-1 contingency enumeration and exhaustive post-fault reconfiguration.
//
// For one contingency every assignment of the galvanic switches is a
// candidate topology. Radial candidates that respect bus fault-level limits
// get optimal converter set-points from a min-cost max-flow over the buses:
// source arcs carry available capacity, demand arcs carry demand, branches
// carry their rating in both directions, and converter arcs cost one unit per
// MVA. The maximum flow is the served demand; the minimum cost is the total
// converter usage. Plans are ranked by (unserved, converter usage, switch
// operations); earlier candidates in (operations, device-id) order win ties.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridhop/balance.hpp"
#include "gridhop/errors.hpp"
#include "gridhop/min_cost_flow.hpp"
#include "gridhop/network.hpp"

namespace gridhop {

enum class ContingencyKind { source_circuit, branch };

struct Contingency {
    std::string element;
    ContingencyKind kind = ContingencyKind::source_circuit;

    bool operator==(const Contingency&) const = default;
};

/// One contingency per in-service grid infeed (loss of one circuit) and one
/// per in-service incoming HV branch.
inline std::vector<Contingency> enumerate_contingencies(const Network& net) {
    std::vector<Contingency> out;
    for (const auto& s : net.sources) {
        if (s.energizes()) out.push_back({s.id, ContingencyKind::source_circuit});
    }
    for (const auto& b : net.branches) {
        if (b.incoming && b.in_service) out.push_back({b.id, ContingencyKind::branch});
    }
    return out;
}

inline Network apply_contingency(Network net, const Contingency& c) {
    if (c.kind == ContingencyKind::source_circuit) {
        auto it = std::find_if(net.sources.begin(), net.sources.end(), [&](const Source& s) { return s.id == c.element; });
        if (it == net.sources.end() || !it->in_service()) throw Error("contingency on unknown or out-of-service source '" + c.element + "'");
        --it->circuits;
    } else {
        auto it = std::find_if(net.branches.begin(), net.branches.end(), [&](const Branch& b) { return b.id == c.element; });
        if (it == net.branches.end() || !it->in_service) throw Error("contingency on unknown or out-of-service branch '" + c.element + "'");
        it->in_service = false;
    }
    return net;
}

/// Replaces demand magnitudes by id.
inline Network apply_scenario(Network net, const std::map<std::string, double>& magnitudes) {
    for (const auto& [id, value] : magnitudes) {
        auto it = std::find_if(net.demands.begin(), net.demands.end(), [&](const Demand& d) { return d.id == id; });
        if (it == net.demands.end()) throw Error("scenario references unknown demand '" + id + "'");
        it->magnitude = value;
    }
    return net;
}

/// Scales the listed demands (all demands when `subset` is empty).
inline Network scale_demands(Network net, double factor, const std::vector<std::string>& subset = {}) {
    const std::set<std::string> chosen(subset.begin(), subset.end());
    for (auto& d : net.demands) {
        if (chosen.empty() || chosen.count(d.id)) d.magnitude *= factor;
    }
    return net;
}

struct SearchOptions {
    bool enforce_fault_levels = true;
    /// Converters that carry power at no cost and are left out of usage.
    std::set<std::string> free_converters;
};

struct ReconfigurationPlan {
    std::string contingency;
    SwitchState state;
    double unserved = 0.0;
    int switch_operations = 0;
    std::vector<std::string> toggled;
    std::map<std::string, double> converter_usage;
    std::map<std::string, double> served_fraction;

    [[nodiscard]] double total_converter_usage() const {
        double total = 0.0;
        for (const auto& [id, u] : converter_usage) total += u;
        return total;
    }
};

namespace detail {

inline double clean(double x) { return std::abs(x) < 1e-12 ? 0.0 : x; }

/// Optimal converter set-points and curtailment for a fixed topology.
inline void dispatch_converters(const Network& net, const SearchOptions& options, ReconfigurationPlan& plan) {
    const auto idx = bus_index(net);
    const std::size_t n = net.buses.size();
    MinCostFlow graph(n + 2);
    const std::size_t source = n;
    const std::size_t sink = n + 1;

    for (const auto& s : net.sources) {
        if (s.energizes()) graph.add_arc(source, idx.at(s.bus), s.available(), 0.0);
    }
    std::vector<double> bus_demand(n, 0.0);
    for (const auto& d : net.demands) bus_demand[idx.at(d.bus)] += d.magnitude;
    std::vector<std::size_t> demand_arc(n);
    for (std::size_t b = 0; b < n; ++b) demand_arc[b] = graph.add_arc(b, sink, bus_demand[b], 0.0);
    for (const auto& e : galvanic_edges(net, plan.state)) {
        graph.add_arc(e.a, e.b, e.rating, 0.0);
        graph.add_arc(e.b, e.a, e.rating, 0.0);
    }

    struct ConverterArcs {
        const SwitchableDevice* device;
        std::vector<std::size_t> out; // into terminal t
        std::vector<std::size_t> in;  // out of terminal t
    };
    std::vector<ConverterArcs> converters;
    for (const auto& d : net.devices) {
        const bool free = options.free_converters.count(d.id) > 0;
        if (!d.has_converter() || plan.state.closed(d)) continue;
        const double cost = free ? 0.0 : 1.0;
        ConverterArcs arcs{&d, {}, {}};
        if (!d.multi_terminal()) {
            const auto a = idx.at(d.from_bus());
            const auto b = idx.at(d.to_bus());
            arcs.out = {graph.add_arc(b, a, d.converter_rating, cost), graph.add_arc(a, b, d.converter_rating, cost)};
            arcs.in = {arcs.out[1], arcs.out[0]};
        } else {
            const auto hub_in = graph.add_node();
            const auto hub_out = graph.add_node();
            graph.add_arc(hub_in, hub_out, d.converter_rating, cost);
            for (const auto& t : d.terminals) {
                arcs.in.push_back(graph.add_arc(idx.at(t), hub_in, MinCostFlow::kInfinity, 0.0));
                arcs.out.push_back(graph.add_arc(hub_out, idx.at(t), MinCostFlow::kInfinity, 0.0));
            }
        }
        converters.push_back(std::move(arcs));
    }

    const auto result = graph.solve(source, sink);
    plan.unserved = std::max(0.0, clean(net.total_demand() - result.flow));

    const auto partition = energized_islands(net, plan.state);
    for (const auto& d : net.demands) {
        const auto b = idx.at(d.bus);
        double fraction = 0.0;
        if (bus_demand[b] > 0.0) {
            fraction = std::clamp(graph.flow(demand_arc[b]) / bus_demand[b], 0.0, 1.0);
        } else {
            fraction = partition.islands[partition.island_of.at(d.bus)].energized ? 1.0 : 0.0;
        }
        plan.served_fraction[d.id] = fraction;
    }

    for (const auto& arcs : converters) {
        const auto& d = *arcs.device;
        std::vector<double> inj(d.terminals.size());
        double usage = 0.0;
        for (std::size_t t = 0; t < d.terminals.size(); ++t) {
            inj[t] = clean(graph.flow(arcs.out[t]) - graph.flow(arcs.in[t]));
            usage += std::max(0.0, inj[t]);
        }
        if (!d.multi_terminal()) {
            // A two-terminal transfer: keep the injections antisymmetric.
            inj[0] = -inj[1];
            usage = std::abs(inj[1]);
        }
        plan.state.injections[d.id] = std::move(inj);
        if (!options.free_converters.count(d.id)) plan.converter_usage[d.id] = usage;
    }
}

/// Galvanic switches available to reconfiguration, in stable id order. The
/// bypass switch of a hop1 stays open: it only backs up the converter, so a
/// hop1 behaves exactly like a sop of the same rating.
inline std::vector<const SwitchableDevice*> switchable_devices(const Network& net) {
    std::vector<const SwitchableDevice*> out;
    for (const auto& d : net.devices) {
        if (d.has_switch() && !d.multi_terminal() && d.kind != DeviceKind::hop1) out.push_back(&d);
    }
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->id < b->id; });
    return out;
}

/// All toggle masks ordered by number of operations, then by value.
inline std::vector<std::uint32_t> toggle_order(std::size_t k) {
    if (k > 20) throw Error("too many switchable devices for exhaustive search");
    std::vector<std::uint32_t> masks(std::size_t{1} << k);
    for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
    return masks;
}

/// Plan for one toggle mask, or nothing when radiality or fault level fails.
inline std::optional<ReconfigurationPlan> evaluate_topology(const Network& net,
                                                            const std::vector<const SwitchableDevice*>& switchable,
                                                            std::uint32_t mask, const SearchOptions& options) {
    ReconfigurationPlan plan;
    plan.state = normal_state(net);
    for (std::size_t i = 0; i < switchable.size(); ++i) {
        if (!(mask & (1u << i))) continue;
        const auto* d = switchable[i];
        plan.state.switches[d->id] =
            d->normal_state == SwitchPosition::open ? SwitchPosition::closed : SwitchPosition::open;
        plan.toggled.push_back(d->id);
    }
    plan.switch_operations = static_cast<int>(plan.toggled.size());
    if (!is_radial(net, plan.state)) return std::nullopt;
    if (options.enforce_fault_levels && !fault_level_violations(net, plan.state).empty()) return std::nullopt;
    dispatch_converters(net, options, plan);
    return plan;
}

inline bool ranks_before(const ReconfigurationPlan& a, const ReconfigurationPlan& b) {
    if (a.unserved < b.unserved - kTolerance) return true;
    if (a.unserved > b.unserved + kTolerance) return false;
    const double ua = a.total_converter_usage();
    const double ub = b.total_converter_usage();
    if (ua < ub - kTolerance) return true;
    if (ua > ub + kTolerance) return false;
    return a.switch_operations < b.switch_operations;
}

inline std::string describe(const Contingency& c) {
    return (c.kind == ContingencyKind::source_circuit ? "source:" : "branch:") + c.element;
}

} // namespace detail

/// Best post-fault plan: minimum unserved demand, then minimum converter
/// usage, then fewest switch operations.
inline ReconfigurationPlan best_reconfiguration(const Network& net, const Contingency& c,
                                                const SearchOptions& options = {}) {
    const Network post = apply_contingency(net, c);
    const auto switchable = detail::switchable_devices(post);

    double capacity = 0.0;
    for (const auto& s : post.sources) {
        if (s.energizes()) capacity += s.available();
    }
    const double lower_bound = std::max(0.0, post.total_demand() - capacity);

    std::optional<ReconfigurationPlan> best;
    for (auto mask : detail::toggle_order(switchable.size())) {
        if (best && std::popcount(mask) > best->switch_operations && best->unserved <= lower_bound + kTolerance &&
            best->total_converter_usage() <= kTolerance)
            break; // nothing later can rank higher
        auto candidate = detail::evaluate_topology(post, switchable, mask, options);
        if (candidate && (!best || detail::ranks_before(*candidate, *best))) best = std::move(candidate);
    }
    if (!best) throw Infeasible("no radial state satisfies the constraints for contingency " + detail::describe(c));
    best->contingency = c.element;
    return *best;
}

/// Every radial, fault-level-feasible topology for the contingency with its
/// optimal set-points, in search order.
inline std::vector<ReconfigurationPlan> feasible_plans(const Network& net, const Contingency& c,
                                                       const SearchOptions& options = {}) {
    const Network post = apply_contingency(net, c);
    const auto switchable = detail::switchable_devices(post);
    std::vector<ReconfigurationPlan> out;
    for (auto mask : detail::toggle_order(switchable.size())) {
        if (auto plan = detail::evaluate_topology(post, switchable, mask, options)) {
            plan->contingency = c.element;
            out.push_back(std::move(*plan));
        }
    }
    return out;
}

/// Unserved demand when the switches stay in their normal positions;
/// converters may still act.
inline double unserved_without_reconfiguration(const Network& net, const Contingency& c) {
    const Network post = apply_contingency(net, c);
    SearchOptions relaxed;
    relaxed.enforce_fault_levels = false;
    auto plan = detail::evaluate_topology(post, detail::switchable_devices(post), 0, relaxed);
    return plan ? plan->unserved : post.total_demand();
}

/// Worst-case unserved demand over all contingencies after reconfiguration.
inline double capacity_shortfall(const Network& net, const SearchOptions& options = {}) {
    double worst = 0.0;
    for (const auto& c : enumerate_contingencies(net)) worst = std::max(worst, best_reconfiguration(net, c, options).unserved);
    return worst;
}

struct N1Analysis {
    std::vector<Contingency> contingencies;
    std::vector<ReconfigurationPlan> plans;
    std::vector<double> unserved_before; // per contingency, normal switch positions
    double capacity_shortfall = 0.0;
    double shortfall_before_reconfiguration = 0.0;

    [[nodiscard]] bool secure() const { return capacity_shortfall <= kTolerance; }
};

/// Evaluates contingencies concurrently; results are in enumeration order.
inline N1Analysis analyze_n1(const Network& net, const SearchOptions& options = {}) {
    N1Analysis out;
    out.contingencies = enumerate_contingencies(net);
    std::vector<std::future<std::pair<ReconfigurationPlan, double>>> jobs;
    jobs.reserve(out.contingencies.size());
    for (const auto& c : out.contingencies) {
        jobs.push_back(std::async(std::launch::async, [&net, c, &options] {
            return std::make_pair(best_reconfiguration(net, c, options), unserved_without_reconfiguration(net, c));
        }));
    }
    for (auto& job : jobs) {
        auto [plan, before] = job.get();
        out.capacity_shortfall = std::max(out.capacity_shortfall, plan.unserved);
        out.shortfall_before_reconfiguration = std::max(out.shortfall_before_reconfiguration, before);
        out.plans.push_back(std::move(plan));
        out.unserved_before.push_back(before);
    }
    return out;
}

struct FirmCapacity {
    double value = 0.0; // summed MVA of the scaled demands at the limit
    double scale = 0.0;
    bool unbounded = false;
    bool secure_at_zero = true;
};

/// Largest uniform scaling of the demand profile (or of `scaled` demands
/// only, others held fixed) that leaves no N-1 shortfall.
inline FirmCapacity firm_capacity(const Network& net, const std::vector<std::string>& scaled = {}) {
    const std::set<std::string> chosen(scaled.begin(), scaled.end());
    double profile = 0.0;
    for (const auto& d : net.demands) {
        if (chosen.empty() || chosen.count(d.id)) profile += d.magnitude;
    }
    FirmCapacity out;
    if (profile <= kTolerance) {
        out.unbounded = true;
        out.value = std::numeric_limits<double>::infinity();
        out.scale = std::numeric_limits<double>::infinity();
        return out;
    }
    auto secure = [&](double s) { return capacity_shortfall(scale_demands(net, s, scaled)) <= kTolerance; };
    if (!secure(0.0)) {
        out.secure_at_zero = false;
        return out;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (secure(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi * profile > 1e12) {
            out.unbounded = true;
            out.value = std::numeric_limits<double>::infinity();
            out.scale = std::numeric_limits<double>::infinity();
            return out;
        }
    }
    while ((hi - lo) * profile > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (secure(mid) ? lo : hi) = mid;
    }
    out.scale = lo;
    out.value = lo * profile;
    return out;
}

} // namespace gridhop
