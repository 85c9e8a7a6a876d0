#pragma once

// Independent reference implementations used only by the tests. None of
// this shares code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gridhop/network.hpp"

namespace oracle {

// Dense two-phase simplex: maximize c.x subject to A x <= b, x >= 0.
// b may be negative. Bland's rule, so it terminates.
class Simplex {
public:
    Simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b, const std::vector<double>& c)
        : m_(b.size()), n_(c.size()), D_(m_ + 2, std::vector<double>(n_ + 2)), B_(m_), N_(n_ + 1) {
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < n_; ++j) D_[i][j] = A[i][j];
        for (std::size_t i = 0; i < m_; ++i) {
            B_[i] = static_cast<int>(n_ + i);
            D_[i][n_] = -1;
            D_[i][n_ + 1] = b[i];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            N_[j] = static_cast<int>(j);
            D_[m_][j] = -c[j];
        }
        N_[n_] = -1;
        D_[m_ + 1][n_] = 1;
    }

    /// Optimal value, or nullopt when infeasible. Unbounded gives +inf.
    std::optional<double> solve(std::vector<double>& x) {
        std::size_t r = 0;
        for (std::size_t i = 1; i < m_; ++i)
            if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
        if (m_ > 0 && D_[r][n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!run(1) || D_[m_ + 1][n_ + 1] < -kEps) return std::nullopt;
            for (std::size_t i = 0; i < m_; ++i) {
                if (B_[i] == -1) {
                    std::size_t s = 0;
                    for (std::size_t j = 1; j <= n_; ++j)
                        if (better(j, s, i)) s = j;
                    pivot(i, s);
                }
            }
        }
        if (!run(0)) return std::numeric_limits<double>::infinity();
        x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (B_[i] >= 0 && static_cast<std::size_t>(B_[i]) < n_) x[B_[i]] = D_[i][n_ + 1];
        return D_[m_][n_ + 1];
    }

private:
    static constexpr double kEps = 1e-11;
    std::size_t m_, n_;
    std::vector<std::vector<double>> D_;
    std::vector<int> B_, N_;

    bool better(std::size_t j, std::size_t s, std::size_t row) const {
        if (D_[row][j] < D_[row][s]) return true;
        return D_[row][j] == D_[row][s] && N_[j] < N_[s];
    }

    void pivot(std::size_t r, std::size_t s) {
        const double inv = 1.0 / D_[r][s];
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            for (std::size_t j = 0; j < n_ + 2; ++j)
                if (j != s) D_[i][j] -= D_[r][j] * D_[i][s] * inv;
        }
        for (std::size_t j = 0; j < n_ + 2; ++j)
            if (j != s) D_[r][j] *= inv;
        for (std::size_t i = 0; i < m_ + 2; ++i)
            if (i != r) D_[i][s] *= -inv;
        D_[r][s] = inv;
        std::swap(B_[r], N_[s]);
    }

    bool run(int phase) {
        const std::size_t row = phase == 1 ? m_ + 1 : m_;
        for (int guard = 0; guard < 100000; ++guard) {
            std::optional<std::size_t> s;
            for (std::size_t j = 0; j <= n_; ++j) {
                if (phase == 0 && N_[j] == -1) continue;
                if (D_[row][j] < -kEps && (!s || N_[j] < N_[*s])) s = j;
            }
            if (!s) return true;
            std::optional<std::size_t> r;
            for (std::size_t i = 0; i < m_; ++i) {
                if (D_[i][*s] < kEps) continue;
                if (!r) {
                    r = i;
                    continue;
                }
                const double lhs = D_[i][n_ + 1] / D_[i][*s];
                const double rhs = D_[*r][n_ + 1] / D_[*r][*s];
                if (lhs < rhs - kEps || (std::abs(lhs - rhs) <= kEps && B_[i] < B_[*r])) r = i;
            }
            if (!r) return false;
            pivot(*r, *s);
        }
        return false;
    }
};

// --- topology by plain depth-first search ------------------------------------

struct Topology {
    std::vector<int> component;         // per bus
    int components = 0;
    bool acyclic = true;                // edges == nodes - 1 in every component
    std::vector<std::vector<std::pair<int, int>>> adjacency; // (neighbour, edge index)
    struct Edge {
        int a, b;
        double rating;
    };
    std::vector<Edge> edges;
};

inline std::map<std::string, int> bus_numbers(const gridhop::Network& net) {
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < net.buses.size(); ++i) idx[net.buses[i].id] = static_cast<int>(i);
    return idx;
}

/// `closed` holds the ids of closed two-terminal switches.
inline Topology topology(const gridhop::Network& net, const std::set<std::string>& closed) {
    const auto idx = bus_numbers(net);
    Topology t;
    const int n = static_cast<int>(net.buses.size());
    t.adjacency.assign(n, {});
    for (const auto& br : net.branches) {
        if (!br.in_service) continue;
        t.edges.push_back({idx.at(br.from_bus), idx.at(br.to_bus), br.rating});
    }
    for (const auto& d : net.devices) {
        if (d.terminals.size() == 2 && closed.count(d.id))
            t.edges.push_back({idx.at(d.terminals[0]), idx.at(d.terminals[1]), std::numeric_limits<double>::infinity()});
    }
    for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
        t.adjacency[t.edges[e].a].push_back({t.edges[e].b, e});
        t.adjacency[t.edges[e].b].push_back({t.edges[e].a, e});
    }
    t.component.assign(n, -1);
    for (int s = 0; s < n; ++s) {
        if (t.component[s] >= 0) continue;
        std::vector<int> stack{s};
        t.component[s] = t.components;
        int nodes = 0;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            ++nodes;
            for (auto [v, e] : t.adjacency[u]) {
                if (t.component[v] < 0) {
                    t.component[v] = t.components;
                    stack.push_back(v);
                }
            }
        }
        int edge_count = 0;
        for (const auto& e : t.edges)
            if (t.component[e.a] == t.components) ++edge_count;
        if (edge_count != nodes - 1) t.acyclic = false;
        ++t.components;
    }
    return t;
}

/// Radial per the edge-count formulation plus at most one grid infeed per component.
inline bool radial(const gridhop::Network& net, const Topology& t) {
    if (!t.acyclic) return false;
    const auto idx = bus_numbers(net);
    std::vector<int> infeeds(t.components, 0);
    for (const auto& s : net.sources)
        if (s.kind == gridhop::SourceKind::grid_infeed && s.circuits > 0) ++infeeds[t.component[idx.at(s.bus)]];
    return std::all_of(infeeds.begin(), infeeds.end(), [](int k) { return k <= 1; });
}

inline bool fault_levels_ok(const gridhop::Network& net, const Topology& t) {
    const auto idx = bus_numbers(net);
    std::vector<double> level(t.components, 0.0);
    for (const auto& s : net.sources)
        if (s.circuits > 0) level[t.component[idx.at(s.bus)]] += s.fault_contribution;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const auto& lim = net.buses[i].fault_level_limit;
        if (lim && level[t.component[i]] > *lim + 1e-9) return false;
    }
    return true;
}

// --- dispatch LP on a fixed radial topology ----------------------------------

struct Dispatch {
    double unserved = 0.0;
    double usage = 0.0;
};

/// Max served demand, then min converter throughput, written directly on the
/// tree: each edge flow is the served demand minus converter injection on
/// its far side.
inline Dispatch dispatch(const gridhop::Network& net, const Topology& t) {
    const auto idx = bus_numbers(net);
    const int n = static_cast<int>(net.buses.size());

    // Variables: served per demand, then converter port out/in pairs.
    std::vector<double> upper;
    std::vector<double> objective;
    std::vector<std::vector<std::pair<int, double>>> bus_terms(n); // net withdrawal at bus: +served, -out, +in
    for (const auto& d : net.demands) {
        bus_terms[idx.at(d.bus)].push_back({static_cast<int>(upper.size()), 1.0});
        upper.push_back(d.magnitude);
        objective.push_back(1.0);
    }
    struct Conv {
        std::vector<int> out, in;
        double rating;
    };
    std::vector<Conv> convs;
    constexpr double kPenalty = 1e-6;
    for (const auto& d : net.devices) {
        if (d.converter_rating <= 0.0) continue;
        Conv c{{}, {}, d.converter_rating};
        for (const auto& bus : d.terminals) {
            const int o = static_cast<int>(upper.size());
            upper.push_back(std::numeric_limits<double>::infinity());
            objective.push_back(-kPenalty);
            const int i = static_cast<int>(upper.size());
            upper.push_back(std::numeric_limits<double>::infinity());
            objective.push_back(0.0);
            bus_terms[idx.at(bus)].push_back({o, -1.0});
            bus_terms[idx.at(bus)].push_back({i, 1.0});
            c.out.push_back(o);
            c.in.push_back(i);
        }
        convs.push_back(std::move(c));
    }
    const std::size_t vars = upper.size();
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    auto row = [&](const std::vector<double>& coeffs, double rhs) {
        A.push_back(coeffs);
        b.push_back(rhs);
    };
    for (std::size_t v = 0; v < vars; ++v) {
        if (std::isfinite(upper[v])) {
            std::vector<double> r(vars, 0.0);
            r[v] = 1.0;
            row(r, upper[v]);
        }
    }
    for (const auto& c : convs) {
        std::vector<double> cap(vars, 0.0), bal(vars, 0.0);
        for (std::size_t k = 0; k < c.out.size(); ++k) {
            cap[c.out[k]] = 1.0;
            bal[c.out[k]] = 1.0;
            bal[c.in[k]] = -1.0;
        }
        row(cap, c.rating);
        row(bal, 0.0);
        for (auto& x : bal) x = -x;
        row(bal, 0.0);
    }

    // Per component: root supply in [0, capacity] (0 when dead); per edge
    // the subtree withdrawal within +-rating.
    std::vector<double> capacity(t.components, 0.0);
    std::vector<int> root(t.components, -1);
    for (const auto& s : net.sources) {
        if (s.kind != gridhop::SourceKind::grid_infeed || s.circuits <= 0) continue;
        const int comp = t.component[idx.at(s.bus)];
        capacity[comp] += s.capacity * s.circuits;
        root[comp] = idx.at(s.bus);
    }
    for (int v = 0; v < n; ++v)
        if (root[t.component[v]] < 0) root[t.component[v]] = v;

    auto withdrawal = [&](const std::vector<int>& buses) {
        std::vector<double> r(vars, 0.0);
        for (int u : buses)
            for (auto [var, coef] : bus_terms[u]) r[var] += coef;
        return r;
    };
    for (int comp = 0; comp < t.components; ++comp) {
        std::vector<int> members;
        for (int v = 0; v < n; ++v)
            if (t.component[v] == comp) members.push_back(v);
        auto total = withdrawal(members);
        row(total, capacity[comp]);
        for (auto& x : total) x = -x;
        row(total, 0.0);

        // subtree of each child below the root
        std::vector<int> parent(n, -2), parent_edge(n, -1), order{root[comp]};
        parent[root[comp]] = -1;
        for (std::size_t k = 0; k < order.size(); ++k) {
            for (auto [v, e] : t.adjacency[order[k]]) {
                if (parent[v] != -2) continue;
                parent[v] = order[k];
                parent_edge[v] = e;
                order.push_back(v);
            }
        }
        for (int v : order) {
            if (parent[v] < 0 || !std::isfinite(t.edges[parent_edge[v]].rating)) continue;
            std::vector<int> below;
            for (int u : order) {
                for (int w = u; w >= 0; w = parent[w]) {
                    if (w == v) {
                        below.push_back(u);
                        break;
                    }
                }
            }
            auto flow = withdrawal(below);
            row(flow, t.edges[parent_edge[v]].rating);
            for (auto& x : flow) x = -x;
            row(flow, t.edges[parent_edge[v]].rating);
        }
    }

    Simplex lp(A, b, objective);
    std::vector<double> x;
    const auto value = lp.solve(x);
    Dispatch out;
    double served = 0.0;
    for (std::size_t k = 0; k < net.demands.size(); ++k) served += x.at(k);
    out.unserved = std::max(0.0, net.total_demand() - served);
    for (const auto& c : convs) {
        double net_out = 0.0;
        for (std::size_t k = 0; k < c.out.size(); ++k) net_out += std::max(0.0, x[c.out[k]] - x[c.in[k]]);
        out.usage += net_out;
    }
    (void)value;
    return out;
}

/// Best (unserved, usage) over every switch combination, or nullopt when no
/// combination is radial and within fault limits. `net` is post-contingency.
inline std::optional<Dispatch> exhaustive(const gridhop::Network& net, bool enforce_fault_levels = true) {
    std::vector<std::string> switches;
    for (const auto& d : net.devices) {
        if (d.terminals.size() == 2 && d.kind != gridhop::DeviceKind::sop && d.kind != gridhop::DeviceKind::hop1)
            switches.push_back(d.id);
    }
    std::optional<Dispatch> best;
    for (std::uint32_t mask = 0; mask < (1u << switches.size()); ++mask) {
        std::set<std::string> closed;
        for (std::size_t k = 0; k < switches.size(); ++k)
            if (mask & (1u << k)) closed.insert(switches[k]);
        const auto t = topology(net, closed);
        if (!radial(net, t)) continue;
        if (enforce_fault_levels && !fault_levels_ok(net, t)) continue;
        const auto d = dispatch(net, t);
        if (!best || d.unserved < best->unserved - 1e-7 ||
            (std::abs(d.unserved - best->unserved) <= 1e-7 && d.usage < best->usage))
            best = d;
    }
    return best;
}

// --- random networks -----------------------------------------------------------

struct GeneratorOptions {
    int max_buses = 10;
    int max_switches = 8;
    bool converters = true;
    bool fault_limits = true;
};

/// Radial-in-normal-state network: a forest rooted at 1-3 substations
/// (some fed over an incoming branch), ncps inside trees, nops as ties.
inline gridhop::Network random_network(std::mt19937_64& rng, const GeneratorOptions& opt = {}) {
    using namespace gridhop;
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    Network net;
    const int n = pick(3, opt.max_buses);
    const int subs = std::min(n - 1, pick(1, 3));
    for (int i = 0; i < n; ++i)
        net.buses.push_back({"b" + std::to_string(i), i < subs ? BusKind::substation_busbar : BusKind::feeder_node,
                             std::nullopt, {}});
    int switches = 0;
    int devices = 0;
    for (int s = 0; s < subs; ++s) {
        if (s > 0 && pick(0, 3) == 0) {
            Branch hv{"hv" + std::to_string(s), "b0", "b" + std::to_string(s), uniform(2.0, 20.0), true, true, {}};
            net.branches.push_back(hv);
        } else {
            net.sources.push_back({"s" + std::to_string(s), "b" + std::to_string(s), uniform(2.0, 12.0), pick(1, 2),
                                   uniform(50.0, 250.0), SourceKind::grid_infeed, {}});
        }
    }
    // the incoming branch chains all hang off b0, which always has a source
    for (int i = subs; i < n; ++i) {
        const int parent = pick(0, i - 1);
        const auto from = "b" + std::to_string(parent);
        const auto to = "b" + std::to_string(i);
        if (switches < opt.max_switches && pick(0, 2) == 0) {
            SwitchableDevice d{"d" + std::to_string(devices++), DeviceKind::ncp, {from, to}, SwitchPosition::closed, 0.0, {}};
            if (opt.converters && pick(0, 4) == 0) {
                d.kind = DeviceKind::hop2;
                d.converter_rating = uniform(0.2, 3.0);
            }
            net.devices.push_back(d);
            ++switches;
        } else {
            net.branches.push_back({"l" + std::to_string(i), from, to, uniform(1.0, 10.0), true, false, {}});
        }
    }
    const int ties = pick(0, std::max(0, opt.max_switches - switches));
    for (int k = 0; k < ties; ++k) {
        int a = pick(0, n - 1);
        int b = pick(0, n - 1);
        if (a == b) continue;
        SwitchableDevice d{"d" + std::to_string(devices++), DeviceKind::nop,
                           {"b" + std::to_string(a), "b" + std::to_string(b)}, SwitchPosition::open, 0.0, {}};
        if (opt.converters) {
            const int roll = pick(0, 5);
            if (roll == 0) d.kind = DeviceKind::sop;
            if (roll == 1) d.kind = DeviceKind::hop1;
            if (d.kind != DeviceKind::nop) d.converter_rating = uniform(0.2, 3.0);
        }
        net.devices.push_back(d);
        if (d.kind == DeviceKind::nop) ++switches;
    }
    if (opt.converters && n >= 4 && pick(0, 5) == 0) {
        std::vector<std::string> terms;
        std::set<int> used;
        while (terms.size() < 3) {
            const int b = pick(0, n - 1);
            if (used.insert(b).second) terms.push_back("b" + std::to_string(b));
        }
        net.devices.push_back({"mt" + std::to_string(devices++), DeviceKind::sop, terms, SwitchPosition::open,
                               uniform(0.5, 4.0), {}});
    }
    if (pick(0, 3) == 0) {
        const int b = pick(subs, n - 1);
        net.sources.push_back({"dg", "b" + std::to_string(b), uniform(0.5, 2.0), 1, uniform(10.0, 80.0), SourceKind::dg, {}});
    }
    if (opt.fault_limits) {
        for (auto& bus : net.buses)
            if (pick(0, 4) == 0) bus.fault_level_limit = uniform(150.0, 450.0);
    }
    for (int i = 0; i < n; ++i) {
        if (pick(0, 4) != 0)
            net.demands.push_back({"D" + std::to_string(i), "b" + std::to_string(i), uniform(0.0, 6.0), {}});
    }
    return net;
}

} // namespace oracle
