#pragma once

// Network domain types and topology predicates: island partition,
// radiality, and additive fault-level aggregation.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace gridhop {

/// Absolute tolerance for every MVA comparison.
inline constexpr double kTolerance = 1e-9;

enum class BusKind { substation_busbar, feeder_node, tee_point };
enum class SourceKind { grid_infeed, dg };
enum class DeviceKind { nop, ncp, sop, hop1, hop2 };
enum class SwitchPosition { open, closed };

inline std::string_view to_string(BusKind k) {
    switch (k) {
    case BusKind::substation_busbar: return "substation-busbar";
    case BusKind::feeder_node: return "feeder-node";
    case BusKind::tee_point: return "tee-point";
    }
    return "?";
}

inline std::string_view to_string(SourceKind k) {
    return k == SourceKind::grid_infeed ? "grid-infeed" : "dg";
}

inline std::string_view to_string(DeviceKind k) {
    switch (k) {
    case DeviceKind::nop: return "nop";
    case DeviceKind::ncp: return "ncp";
    case DeviceKind::sop: return "sop";
    case DeviceKind::hop1: return "hop1";
    case DeviceKind::hop2: return "hop2";
    }
    return "?";
}

inline std::string_view to_string(SwitchPosition p) {
    return p == SwitchPosition::open ? "open" : "closed";
}

inline std::optional<BusKind> parse_bus_kind(std::string_view s) {
    if (s == "substation-busbar") return BusKind::substation_busbar;
    if (s == "feeder-node") return BusKind::feeder_node;
    if (s == "tee-point") return BusKind::tee_point;
    return std::nullopt;
}

inline std::optional<SourceKind> parse_source_kind(std::string_view s) {
    if (s == "grid-infeed") return SourceKind::grid_infeed;
    if (s == "dg") return SourceKind::dg;
    return std::nullopt;
}

inline std::optional<DeviceKind> parse_device_kind(std::string_view s) {
    if (s == "nop") return DeviceKind::nop;
    if (s == "ncp") return DeviceKind::ncp;
    if (s == "sop") return DeviceKind::sop;
    if (s == "hop1") return DeviceKind::hop1;
    if (s == "hop2") return DeviceKind::hop2;
    return std::nullopt;
}

inline std::optional<SwitchPosition> parse_switch_position(std::string_view s) {
    if (s == "open") return SwitchPosition::open;
    if (s == "closed") return SwitchPosition::closed;
    return std::nullopt;
}

struct Bus {
    std::string id;
    BusKind kind = BusKind::feeder_node;
    std::optional<double> fault_level_limit; // MVA; absent = unconstrained
    std::string provenance;

    bool operator==(const Bus&) const = default;
};

/// A grid infeed is `circuits` identical incoming circuits of `capacity`
/// MVA each. Losing one circuit is one contingency.
struct Source {
    std::string id;
    std::string bus;
    double capacity = 0.0; // per circuit
    int circuits = 1;
    double fault_contribution = 0.0;
    SourceKind kind = SourceKind::grid_infeed;
    std::string provenance;

    [[nodiscard]] bool in_service() const { return circuits > 0; }
    [[nodiscard]] double available() const { return in_service() ? capacity * circuits : 0.0; }
    [[nodiscard]] bool energizes() const { return kind == SourceKind::grid_infeed && in_service(); }

    bool operator==(const Source&) const = default;
};

struct Branch {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double rating = 0.0;
    bool in_service = true;
    bool incoming = false; // incoming HV circuit, enumerated as a contingency
    std::string provenance;

    bool operator==(const Branch&) const = default;
};

struct Demand {
    std::string id;
    std::string bus;
    double magnitude = 0.0;
    std::string provenance;

    bool operator==(const Demand&) const = default;
};

/// Normally open/closed point, soft open point or hybrid open point.
/// Two-terminal devices run terminals[0] -> terminals[1]; a device with
/// three or more terminals is a multi-terminal converter whose rating bounds
/// its total throughput.
struct SwitchableDevice {
    std::string id;
    DeviceKind kind = DeviceKind::nop;
    std::vector<std::string> terminals;
    SwitchPosition normal_state = SwitchPosition::open;
    double converter_rating = 0.0;
    std::string provenance;

    [[nodiscard]] bool has_switch() const { return kind != DeviceKind::sop; }
    [[nodiscard]] bool has_converter() const { return converter_rating > 0.0; }
    [[nodiscard]] bool multi_terminal() const { return terminals.size() > 2; }
    [[nodiscard]] const std::string& from_bus() const { return terminals.at(0); }
    [[nodiscard]] const std::string& to_bus() const { return terminals.at(1); }

    bool operator==(const SwitchableDevice&) const = default;
};

struct Network {
    std::vector<Bus> buses;
    std::vector<Source> sources;
    std::vector<Branch> branches;
    std::vector<Demand> demands;
    std::vector<SwitchableDevice> devices;

    [[nodiscard]] const Bus* find_bus(std::string_view id) const { return find(buses, id); }
    [[nodiscard]] const Source* find_source(std::string_view id) const { return find(sources, id); }
    [[nodiscard]] const Branch* find_branch(std::string_view id) const { return find(branches, id); }
    [[nodiscard]] const Demand* find_demand(std::string_view id) const { return find(demands, id); }
    [[nodiscard]] const SwitchableDevice* find_device(std::string_view id) const { return find(devices, id); }

    [[nodiscard]] double total_demand() const {
        return std::accumulate(demands.begin(), demands.end(), 0.0,
                               [](double acc, const Demand& d) { return acc + d.magnitude; });
    }

    bool operator==(const Network&) const = default;

private:
    template <typename T>
    static const T* find(const std::vector<T>& items, std::string_view id) {
        auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
        return it == items.end() ? nullptr : &*it;
    }
};

/// Galvanic switch positions, converter port injections and branch
/// availability. Injections are per terminal, positive into the bus; a
/// two-terminal transfer x from terminals[0] to terminals[1] is {-x, +x}.
struct SwitchState {
    std::map<std::string, SwitchPosition> switches;
    std::map<std::string, std::vector<double>> injections;
    std::map<std::string, bool> branch_in_service;

    [[nodiscard]] bool closed(const SwitchableDevice& d) const {
        if (!d.has_switch()) return false;
        auto it = switches.find(d.id);
        return (it == switches.end() ? d.normal_state : it->second) == SwitchPosition::closed;
    }

    [[nodiscard]] bool in_service(const Branch& b) const {
        auto it = branch_in_service.find(b.id);
        return it == branch_in_service.end() ? b.in_service : it->second;
    }

    [[nodiscard]] double injection(const SwitchableDevice& d, std::size_t terminal) const {
        auto it = injections.find(d.id);
        if (it == injections.end() || terminal >= it->second.size()) return 0.0;
        return it->second[terminal];
    }

    /// Converter usage: the sum of positive port injections.
    [[nodiscard]] double usage(const SwitchableDevice& d) const {
        double total = 0.0;
        for (std::size_t t = 0; t < d.terminals.size(); ++t) total += std::max(0.0, injection(d, t));
        return total;
    }

    bool operator==(const SwitchState&) const = default;
};

inline SwitchState normal_state(const Network& net) {
    SwitchState s;
    for (const auto& d : net.devices) {
        if (d.has_switch()) s.switches[d.id] = d.normal_state;
    }
    for (const auto& b : net.branches) s.branch_in_service[b.id] = b.in_service;
    return s;
}

namespace detail {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns false when a and b were already joined.
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

inline std::map<std::string, std::size_t, std::less<>> bus_index(const Network& net) {
    std::map<std::string, std::size_t, std::less<>> idx;
    for (std::size_t i = 0; i < net.buses.size(); ++i) idx.emplace(net.buses[i].id, i);
    return idx;
}

struct GalvanicEdge {
    std::string id;
    std::size_t a;
    std::size_t b;
    double rating; // infinite for switch contacts
    bool is_device;
};

/// In-service branches and closed switches whose endpoints resolve.
inline std::vector<GalvanicEdge> galvanic_edges(const Network& net, const SwitchState& state) {
    const auto idx = bus_index(net);
    std::vector<GalvanicEdge> edges;
    auto add = [&](const std::string& id, const std::string& from, const std::string& to, double rating,
                   bool is_device) {
        auto f = idx.find(from);
        auto t = idx.find(to);
        if (f != idx.end() && t != idx.end()) edges.push_back({id, f->second, t->second, rating, is_device});
    };
    for (const auto& br : net.branches) {
        if (state.in_service(br)) add(br.id, br.from_bus, br.to_bus, br.rating, false);
    }
    for (const auto& d : net.devices) {
        if (!d.multi_terminal() && d.terminals.size() == 2 && state.closed(d)) {
            add(d.id, d.from_bus(), d.to_bus(), std::numeric_limits<double>::infinity(), true);
        }
    }
    return edges;
}

} // namespace detail

struct Island {
    std::vector<std::string> buses;   // network order
    std::vector<std::string> infeeds; // in-service grid-infeed sources
    bool energized = false;
};

struct Partition {
    std::vector<Island> islands; // ordered by first bus
    std::map<std::string, std::size_t> island_of;
};

/// Connected components over in-service branches and closed switches.
/// Converters never join components.
inline Partition energized_islands(const Network& net, const SwitchState& state) {
    detail::DisjointSets sets(net.buses.size());
    for (const auto& e : detail::galvanic_edges(net, state)) sets.unite(e.a, e.b);

    Partition p;
    std::map<std::size_t, std::size_t> root_to_island;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const auto root = sets.find(i);
        auto [it, inserted] = root_to_island.emplace(root, p.islands.size());
        if (inserted) p.islands.emplace_back();
        p.islands[it->second].buses.push_back(net.buses[i].id);
        p.island_of[net.buses[i].id] = it->second;
    }
    for (const auto& s : net.sources) {
        auto it = p.island_of.find(s.bus);
        if (it == p.island_of.end() || !s.energizes()) continue;
        p.islands[it->second].infeeds.push_back(s.id);
        p.islands[it->second].energized = true;
    }
    return p;
}

/// Every island is acyclic and every energized island has exactly one infeed.
inline bool is_radial(const Network& net, const SwitchState& state) {
    detail::DisjointSets sets(net.buses.size());
    for (const auto& e : detail::galvanic_edges(net, state)) {
        if (!sets.unite(e.a, e.b)) return false;
    }
    const auto p = energized_islands(net, state);
    return std::all_of(p.islands.begin(), p.islands.end(),
                       [](const Island& isl) { return !isl.energized || isl.infeeds.size() == 1; });
}

/// Summed fault contribution of in-service sources inside the island.
inline double island_fault_level(const Network& net, const Island& island) {
    const std::set<std::string> members(island.buses.begin(), island.buses.end());
    double level = 0.0;
    for (const auto& s : net.sources) {
        if (s.in_service() && members.count(s.bus)) level += s.fault_contribution;
    }
    return level;
}

inline double island_fault_level(const Network& net, const SwitchState& state, std::size_t island) {
    return island_fault_level(net, energized_islands(net, state).islands.at(island));
}

struct FaultLevelViolation {
    std::string bus;
    double level;
    double limit;
};

inline std::vector<FaultLevelViolation> fault_level_violations(const Network& net, const SwitchState& state) {
    const auto p = energized_islands(net, state);
    std::vector<double> levels;
    levels.reserve(p.islands.size());
    for (const auto& isl : p.islands) levels.push_back(island_fault_level(net, isl));

    std::vector<FaultLevelViolation> out;
    for (const auto& bus : net.buses) {
        if (!bus.fault_level_limit) continue;
        const double level = levels[p.island_of.at(bus.id)];
        if (level > *bus.fault_level_limit + kTolerance) out.push_back({bus.id, level, *bus.fault_level_limit});
    }
    return out;
}

// --- validation ------------------------------------------------------------

struct Violation {
    std::string code; // duplicate-id, dangling-reference, nonpositive-rating, ...
    std::string element;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_network(const Network& net) {
    ValidationReport report;
    auto flag = [&](std::string code, const std::string& element, std::string message) {
        report.violations.push_back({std::move(code), element, std::move(message)});
    };

    std::set<std::string> bus_ids;
    for (const auto& b : net.buses) {
        if (!bus_ids.insert(b.id).second) flag("duplicate-id", b.id, "bus id used more than once");
        if (b.fault_level_limit && *b.fault_level_limit <= 0.0)
            flag("nonpositive-rating", b.id, "fault_level_limit must be positive");
    }

    std::set<std::string> element_ids;
    auto unique = [&](const std::string& id) {
        if (!element_ids.insert(id).second) flag("duplicate-id", id, "element id used more than once");
    };
    auto resolve = [&](const std::string& element, const std::string& bus) {
        if (!bus_ids.count(bus)) flag("dangling-reference", element, "unknown bus '" + bus + "'");
    };

    for (const auto& s : net.sources) {
        unique(s.id);
        resolve(s.id, s.bus);
        if (s.capacity < 0.0) flag("negative-value", s.id, "capacity must be >= 0");
        if (s.fault_contribution < 0.0) flag("negative-value", s.id, "fault_contribution must be >= 0");
        if (s.circuits < 0) flag("negative-value", s.id, "circuits must be >= 0");
    }
    for (const auto& br : net.branches) {
        unique(br.id);
        resolve(br.id, br.from_bus);
        resolve(br.id, br.to_bus);
        if (br.from_bus == br.to_bus) flag("self-loop", br.id, "from_bus equals to_bus");
        if (br.rating <= 0.0) flag("nonpositive-rating", br.id, "rating must be positive");
    }
    for (const auto& d : net.demands) {
        unique(d.id);
        resolve(d.id, d.bus);
        if (d.magnitude < 0.0) flag("negative-value", d.id, "magnitude must be >= 0");
    }
    for (const auto& d : net.devices) {
        unique(d.id);
        for (const auto& t : d.terminals) resolve(d.id, t);
        if (d.terminals.size() < 2) {
            flag("terminal-count", d.id, "device needs at least two terminals");
        } else {
            const std::set<std::string> distinct(d.terminals.begin(), d.terminals.end());
            if (distinct.size() != d.terminals.size()) flag("self-loop", d.id, "repeated terminal bus");
        }
        if (d.converter_rating < 0.0) flag("negative-value", d.id, "converter_rating must be >= 0");

        const bool open = d.normal_state == SwitchPosition::open;
        switch (d.kind) {
        case DeviceKind::nop:
        case DeviceKind::ncp: {
            const bool want_open = d.kind == DeviceKind::nop;
            if (open != want_open)
                flag("kind-state-mismatch", d.id,
                     std::string(to_string(d.kind)) + " must be normally " + (want_open ? "open" : "closed"));
            if (d.converter_rating != 0.0)
                flag("kind-state-mismatch", d.id, std::string(to_string(d.kind)) + " has no converter");
            break;
        }
        case DeviceKind::hop1:
            if (!open) flag("kind-state-mismatch", d.id, "hop1 switch must be normally open");
            break;
        case DeviceKind::hop2:
            if (open) flag("kind-state-mismatch", d.id, "hop2 switch must be normally closed");
            break;
        case DeviceKind::sop:
            if (!open) flag("kind-state-mismatch", d.id, "sop has no galvanic switch; normal_state must be open");
            if (d.converter_rating <= 0.0) flag("nonpositive-rating", d.id, "sop converter_rating must be positive");
            break;
        }
        if (d.multi_terminal() && d.kind != DeviceKind::sop)
            flag("kind-state-mismatch", d.id, "only sop devices may have more than two terminals");
    }

    if (!report.ok()) return report;

    // Topology checks need a well-formed graph.
    const auto state = normal_state(net);
    if (!is_radial(net, state)) flag("not-radial", "", "normal switch state is not radial");
    for (const auto& v : fault_level_violations(net, state)) {
        flag("fault-level", v.bus, "island fault level exceeds bus limit under normal state");
    }
    const auto p = energized_islands(net, state);
    for (const auto& d : net.demands) {
        if (!p.islands[p.island_of.at(d.bus)].energized)
            flag("de-energized-demand", d.id, "demand bus not energized under normal state");
    }
    return report;
}

} // namespace gridhop
