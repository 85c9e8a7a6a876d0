#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

namespace gridhop::detail {

/// Successive-shortest-path min-cost max-flow on real capacities. Graphs
/// here have a few dozen nodes, so shortest paths use a queue-based
/// Bellman-Ford over the residual network.
class MinCostFlow {
public:
    static constexpr double kInfinity = std::numeric_limits<double>::infinity();

    explicit MinCostFlow(std::size_t nodes) : adjacent_(nodes) {}

    std::size_t add_node() {
        adjacent_.emplace_back();
        return adjacent_.size() - 1;
    }

    /// Returns the arc handle used by flow().
    std::size_t add_arc(std::size_t from, std::size_t to, double capacity, double cost) {
        const std::size_t id = arcs_.size();
        arcs_.push_back({to, capacity, cost, 0.0});
        arcs_.push_back({from, 0.0, -cost, 0.0});
        adjacent_[from].push_back(id);
        adjacent_[to].push_back(id + 1);
        return id;
    }

    struct Result {
        double flow = 0.0;
        double cost = 0.0;
    };

    Result solve(std::size_t source, std::size_t sink) {
        Result r;
        const std::size_t n = adjacent_.size();
        std::vector<double> dist(n);
        std::vector<std::size_t> via(n);
        std::vector<bool> queued(n);
        for (;;) {
            std::fill(dist.begin(), dist.end(), kInfinity);
            std::fill(via.begin(), via.end(), kNone);
            std::fill(queued.begin(), queued.end(), false);
            dist[source] = 0.0;
            std::deque<std::size_t> queue{source};
            queued[source] = true;
            while (!queue.empty()) {
                const auto u = queue.front();
                queue.pop_front();
                queued[u] = false;
                for (auto a : adjacent_[u]) {
                    const auto& arc = arcs_[a];
                    if (residual(a) <= kEpsilon) continue;
                    const double d = dist[u] + arc.cost;
                    if (d < dist[arc.to] - kCostEpsilon) {
                        dist[arc.to] = d;
                        via[arc.to] = a;
                        if (!queued[arc.to]) {
                            queued[arc.to] = true;
                            queue.push_back(arc.to);
                        }
                    }
                }
            }
            if (via[sink] == kNone) break;

            double push = kInfinity;
            for (auto v = sink; v != source; v = arcs_[via[v] ^ 1].to) push = std::min(push, residual(via[v]));
            if (push <= kEpsilon || push == kInfinity) break;
            for (auto v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
                arcs_[via[v]].flow += push;
                arcs_[via[v] ^ 1].flow -= push;
            }
            r.flow += push;
            r.cost += push * dist[sink];
        }
        return r;
    }

    [[nodiscard]] double flow(std::size_t arc) const { return std::max(0.0, arcs_[arc].flow); }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    static constexpr double kEpsilon = 1e-12;
    static constexpr double kCostEpsilon = 1e-12;

    struct Arc {
        std::size_t to;
        double capacity;
        double cost;
        double flow;
    };

    [[nodiscard]] double residual(std::size_t a) const { return arcs_[a].capacity - arcs_[a].flow; }

    std::vector<Arc> arcs_;
    std::vector<std::vector<std::size_t>> adjacent_;
};

} // namespace gridhop::detail
