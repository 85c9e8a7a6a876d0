#pragma once

// Lossless nodal power balance on radial islands: every branch carries the
// sum of the demand downstream of it, net of converter injections.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gridhop/errors.hpp"
#include "gridhop/network.hpp"

namespace gridhop {

struct FlowSolution {
    std::map<std::string, double> flows;          // branch / closed switch, from -> to
    std::map<std::string, double> source_supply;  // MVA delivered by each source
    std::map<std::string, double> served_fraction;
    std::map<std::string, std::vector<double>> converter_injections;
    std::map<std::string, double> unbalanced;     // island root bus -> residual, dead islands only
};

/// Per-demand served fractions; entries override the default (1 on energized
/// islands, 0 elsewhere).
using ServedFractions = std::map<std::string, double>;

inline FlowSolution solve_flows(const Network& net, const SwitchState& state, const ServedFractions& served = {}) {
    if (!is_radial(net, state)) throw NonRadialState("flows requested for a non-radial switch state");

    const auto idx = detail::bus_index(net);
    const auto partition = energized_islands(net, state);
    const auto edges = detail::galvanic_edges(net, state);
    const std::size_t n = net.buses.size();

    FlowSolution sol;
    std::vector<double> load(n, 0.0);
    for (const auto& d : net.demands) {
        const auto bus = idx.at(d.bus);
        const auto& island = partition.islands[partition.island_of.at(d.bus)];
        auto it = served.find(d.id);
        const double fraction = it != served.end() ? it->second : (island.energized ? 1.0 : 0.0);
        sol.served_fraction[d.id] = fraction;
        load[bus] += fraction * d.magnitude;
    }
    for (const auto& d : net.devices) {
        std::vector<double> inj(d.terminals.size(), 0.0);
        for (std::size_t t = 0; t < d.terminals.size(); ++t) {
            inj[t] = state.injection(d, t);
            load[idx.at(d.terminals[t])] -= inj[t];
        }
        sol.converter_injections[d.id] = std::move(inj);
    }

    std::vector<std::vector<std::size_t>> adjacent(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        adjacent[edges[e].a].push_back(e);
        adjacent[edges[e].b].push_back(e);
    }

    // Root each island at its infeed (or first bus) and accumulate subtree
    // loads in reverse breadth-first order.
    std::map<std::string, std::size_t> infeed_bus;
    for (const auto& s : net.sources) {
        sol.source_supply[s.id] = 0.0;
        if (s.energizes()) infeed_bus[s.id] = idx.at(s.bus);
    }
    std::vector<bool> seen(n, false);
    for (const auto& island : partition.islands) {
        const std::string root_source = island.energized ? island.infeeds.front() : std::string{};
        const std::size_t root = island.energized ? infeed_bus.at(root_source) : idx.at(island.buses.front());

        std::vector<std::size_t> order{root};
        std::vector<std::size_t> parent_edge(n, std::numeric_limits<std::size_t>::max());
        seen[root] = true;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto u = order[k];
            for (auto e : adjacent[u]) {
                const auto v = edges[e].a == u ? edges[e].b : edges[e].a;
                if (seen[v]) continue;
                seen[v] = true;
                parent_edge[v] = e;
                order.push_back(v);
            }
        }
        std::vector<double> subtree(load);
        for (auto k = order.size(); k-- > 1;) {
            const auto v = order[k];
            const auto& e = edges[parent_edge[v]];
            const auto u = e.a == v ? e.b : e.a;
            // Flow parent -> child equals the child's subtree load.
            sol.flows[e.id] = e.a == u ? subtree[v] : -subtree[v];
            subtree[u] += subtree[v];
        }
        if (island.energized) {
            sol.source_supply[root_source] = subtree[root];
        } else if (std::abs(subtree[root]) > kTolerance) {
            sol.unbalanced[net.buses[root].id] = subtree[root];
        }
    }
    return sol;
}

enum class ElementClass { branch, source, converter };

inline std::string_view to_string(ElementClass c) {
    switch (c) {
    case ElementClass::branch: return "branch";
    case ElementClass::source: return "source";
    case ElementClass::converter: return "converter";
    }
    return "?";
}

struct Overload {
    std::string element;
    ElementClass element_class;
    double flow;
    double rating;
    double overload;
};

/// Everything loaded beyond its rating; loading exactly at rating is fine.
inline std::vector<Overload> thermal_violations(const Network& net, const FlowSolution& sol) {
    std::vector<Overload> out;
    auto check = [&](const std::string& id, ElementClass cls, double flow, double rating) {
        if (std::abs(flow) > rating + kTolerance) out.push_back({id, cls, flow, rating, std::abs(flow) - rating});
    };
    for (const auto& br : net.branches) {
        if (auto it = sol.flows.find(br.id); it != sol.flows.end()) check(br.id, ElementClass::branch, it->second, br.rating);
    }
    for (const auto& s : net.sources) {
        if (s.kind != SourceKind::grid_infeed) continue;
        if (auto it = sol.source_supply.find(s.id); it != sol.source_supply.end())
            check(s.id, ElementClass::source, it->second, s.available());
    }
    for (const auto& d : net.devices) {
        auto it = sol.converter_injections.find(d.id);
        if (it == sol.converter_injections.end()) continue;
        double usage = 0.0;
        for (double x : it->second) usage += std::max(0.0, x);
        check(d.id, ElementClass::converter, usage, d.converter_rating);
    }
    return out;
}

enum class BindingConstraint { source_capacity, branch_rating, fault_level };

inline std::string_view to_string(BindingConstraint b) {
    switch (b) {
    case BindingConstraint::source_capacity: return "source-capacity";
    case BindingConstraint::branch_rating: return "branch-rating";
    case BindingConstraint::fault_level: return "fault-level";
    }
    return "?";
}

struct HeadroomResult {
    std::string source;
    double headroom = 0.0;
    BindingConstraint binding = BindingConstraint::source_capacity;
    std::string binding_element;
};

/// Largest additional demand that can be drawn at `boundary_bus` (default:
/// the source's own bus) from `source_id` without exceeding the source's
/// capacity or the rating of any branch between the two. Additive fault
/// levels do not depend on load, so the fault-level constraint never binds
/// here.
inline HeadroomResult headroom(const Network& net, const SwitchState& state, const std::string& source_id,
                               const std::string& boundary_bus = {}) {
    const auto* src = net.find_source(source_id);
    if (!src) throw Error("unknown source '" + source_id + "'");
    const std::string& target = boundary_bus.empty() ? src->bus : boundary_bus;
    if (!net.find_bus(target)) throw Error("unknown bus '" + target + "'");

    const auto sol = solve_flows(net, state);
    const auto partition = energized_islands(net, state);
    const auto& island = partition.islands[partition.island_of.at(src->bus)];
    if (!src->energizes() || island.infeeds.front() != source_id)
        throw Error("source '" + source_id + "' does not energize an island");
    if (partition.island_of.at(target) != partition.island_of.at(src->bus))
        throw Error("bus '" + target + "' is not supplied by source '" + source_id + "'");

    HeadroomResult result{source_id, src->available() - sol.source_supply.at(source_id),
                          BindingConstraint::source_capacity, source_id};

    // Walk from the boundary bus back to the infeed.
    const auto idx = detail::bus_index(net);
    const auto edges = detail::galvanic_edges(net, state);
    const std::size_t n = net.buses.size();
    std::vector<std::vector<std::size_t>> adjacent(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        adjacent[edges[e].a].push_back(e);
        adjacent[edges[e].b].push_back(e);
    }
    const auto root = idx.at(src->bus);
    std::vector<std::size_t> parent_edge(n, std::numeric_limits<std::size_t>::max());
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> order{root};
    seen[root] = true;
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (auto e : adjacent[order[k]]) {
            const auto v = edges[e].a == order[k] ? edges[e].b : edges[e].a;
            if (seen[v]) continue;
            seen[v] = true;
            parent_edge[v] = e;
            order.push_back(v);
        }
    }
    for (auto v = idx.at(target); v != root;) {
        const auto& e = edges[parent_edge[v]];
        const auto u = e.a == v ? e.b : e.a;
        const double toward_child = e.a == u ? sol.flows.at(e.id) : -sol.flows.at(e.id);
        const double slack = e.rating - toward_child;
        if (slack < result.headroom) {
            result.headroom = slack;
            result.binding = BindingConstraint::branch_rating;
            result.binding_element = e.id;
        }
        v = u;
    }
    result.headroom = std::max(0.0, result.headroom);
    return result;
}

} // namespace gridhop
