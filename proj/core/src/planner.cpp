#include "sparcas/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

namespace sparcas {

namespace {

int manhattan(const Workspace& w, CellId a, CellId b) {
    const auto& ca = w.cell(a);
    const auto& cb = w.cell(b);
    return std::abs(ca.row - cb.row) + std::abs(ca.col - cb.col);
}

void check_endpoint(const Workspace& w, CellId c, const char* what) {
    if (c.index < 0 || c.index >= w.cell_count()) {
        throw std::invalid_argument(std::string("invalid ") + what + " cell " + std::to_string(c.index));
    }
}

// Exact remaining distance to `goal` for every cell (reverse BFS).
std::vector<int> distances_to(const Workspace& w, CellId goal) {
    std::vector<std::vector<CellId>> predecessors(static_cast<size_t>(w.cell_count()));
    for (const auto& c : w.cells()) {
        for (auto s : w.successors(c.id)) {
            predecessors[static_cast<size_t>(s.index)].push_back(c.id);
        }
    }
    std::vector<int> dist(static_cast<size_t>(w.cell_count()), -1);
    std::deque<CellId> queue{goal};
    dist[static_cast<size_t>(goal.index)] = 0;
    while (!queue.empty()) {
        CellId c = queue.front();
        queue.pop_front();
        for (auto p : predecessors[static_cast<size_t>(c.index)]) {
            if (dist[static_cast<size_t>(p.index)] < 0) {
                dist[static_cast<size_t>(p.index)] = dist[static_cast<size_t>(c.index)] + 1;
                queue.push_back(p);
            }
        }
    }
    return dist;
}

}  // namespace

Path shortest_path(const Workspace& w, CellId source, CellId goal) {
    check_endpoint(w, source, "source");
    check_endpoint(w, goal, "goal");

    const size_t n = static_cast<size_t>(w.cell_count());
    std::vector<int> g(n, std::numeric_limits<int>::max());
    std::vector<CellId> parent(n);
    std::vector<bool> closed(n, false);
    // (f, cell index, g)
    using Entry = std::tuple<int, std::int32_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    g[static_cast<size_t>(source.index)] = 0;
    open.emplace(manhattan(w, source, goal), source.index, 0);
    while (!open.empty()) {
        auto [f, index, cost] = open.top();
        open.pop();
        CellId current{index};
        auto done = closed[static_cast<size_t>(index)];
        if (done || cost != g[static_cast<size_t>(index)]) {
            continue;
        }
        done = true;
        if (current == goal) {
            Path path;
            for (CellId c = goal; c != source; c = parent[static_cast<size_t>(c.index)]) {
                path.cells.push_back(c);
            }
            path.cells.push_back(source);
            std::reverse(path.cells.begin(), path.cells.end());
            return path;
        }
        for (auto next : w.successors(current)) {
            int candidate = cost + 1;
            auto& best = g[static_cast<size_t>(next.index)];
            if (candidate < best) {
                best = candidate;
                parent[static_cast<size_t>(next.index)] = current;
                open.emplace(candidate + manhattan(w, next, goal), next.index, candidate);
            }
        }
    }
    throw UnreachableGoal("no directed path from cell " + std::to_string(source.index) + " to cell " +
                          std::to_string(goal.index));
}

bool Reservation::vertex_free(CellId cell, int t) const {
    return !_vertices.contains(key(cell, t));
}

bool Reservation::edge_free(CellId from, CellId to, int t) const {
    auto it = _moves.find(key(to, t));
    return it == _moves.end() || it->second != from;
}

void Reservation::reserve(CellId cell, int t, RobotId robot) {
    auto [it, inserted] = _vertices.emplace(key(cell, t), robot);
    if (!inserted && it->second != robot) {
        throw std::logic_error("cell " + std::to_string(cell.index) + " at t=" + std::to_string(t) +
                               " already reserved by robot " + std::to_string(it->second));
    }
}

void Reservation::reserve_path(const TimedPath& path, RobotId robot) {
    for (size_t k = 0; k < path.cells.size(); ++k) {
        int t = path.start_time + static_cast<int>(k);
        reserve(path.cells[k], t, robot);
        if (k + 1 < path.cells.size() && path.cells[k + 1] != path.cells[k]) {
            _moves[key(path.cells[k], t)] = path.cells[k + 1];
        }
    }
}

std::optional<RobotId> Reservation::occupant(CellId cell, int t) const {
    auto it = _vertices.find(key(cell, t));
    if (it == _vertices.end()) {
        return std::nullopt;
    }
    return it->second;
}

int default_horizon(const Workspace& workspace) {
    return 4 * (workspace.width() + workspace.height());
}

std::optional<TimedPath> plan_space_time(const Workspace& w, const Reservation& reservation, CellId source,
        CellId goal, int start_time, int horizon) {
    check_endpoint(w, source, "source");
    check_endpoint(w, goal, "goal");
    const auto dist = distances_to(w, goal);
    if (dist[static_cast<size_t>(source.index)] < 0) {
        return std::nullopt;
    }
    const int deadline = start_time + horizon;

    // Nodes are (cell, t) for t in [start_time - 1, deadline]; cell -1 means
    // the robot is still waiting off the map.
    const std::int64_t stride = horizon + 2;
    auto encode = [&](int cell, int t) { return static_cast<std::int64_t>(cell + 1) * stride + (t - start_time + 1); };
    auto decode_cell = [&](std::int64_t key) { return static_cast<int>(key / stride) - 1; };
    auto decode_time = [&](std::int64_t key) { return static_cast<int>(key % stride) + start_time - 1; };
    std::unordered_map<std::int64_t, std::int64_t> parent;

    // Lower f first, then later time (deeper), then smaller cell.
    struct Node {
        int f;
        int t;
        int cell;
        bool operator>(const Node& o) const {
            if (f != o.f) {
                return f > o.f;
            }
            if (t != o.t) {
                return t < o.t;
            }
            return cell > o.cell;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    const int source_distance = dist[static_cast<size_t>(source.index)];
    auto h = [&](int cell) { return cell < 0 ? source_distance + 1 : dist[static_cast<size_t>(cell)]; };

    constexpr int off_map = -1;
    parent[encode(off_map, start_time - 1)] = -1;
    open.push({start_time - 1 + h(off_map), start_time - 1, off_map});

    while (!open.empty()) {
        Node cur = open.top();
        open.pop();
        if (cur.cell == goal.index) {
            std::vector<CellId> reversed;
            std::int64_t key = encode(cur.cell, cur.t);
            while (decode_cell(key) >= 0) {
                reversed.push_back(CellId{decode_cell(key)});
                key = parent.at(key);
            }
            TimedPath path;
            path.start_time = decode_time(key) + 1;
            path.cells.assign(reversed.rbegin(), reversed.rend());
            return path;
        }
        const int nt = cur.t + 1;
        if (nt > deadline) {
            continue;
        }
        const std::int64_t here_key = encode(cur.cell, cur.t);
        auto push = [&](int next_cell) {
            auto [it, inserted] = parent.emplace(encode(next_cell, nt), here_key);
            if (inserted) {
                open.push({nt + h(next_cell), nt, next_cell});
            }
        };
        if (cur.cell == off_map) {
            push(off_map);
            if (reservation.vertex_free(source, nt)) {
                push(source.index);
            }
            continue;
        }
        const CellId here{cur.cell};
        if (reservation.vertex_free(here, nt)) {
            push(cur.cell);
        }
        for (auto next : w.successors(here)) {
            if (dist[static_cast<size_t>(next.index)] < 0) {
                continue;
            }
            if (reservation.vertex_free(next, nt) && reservation.edge_free(here, next, cur.t)) {
                push(next.index);
            }
        }
    }
    return std::nullopt;
}

std::vector<std::optional<TimedPath>> prioritized_plan(const Workspace& workspace,
        std::span<const PlanRequest> robots, int horizon, Reservation reservation) {
    std::vector<std::optional<TimedPath>> plans;
    plans.reserve(robots.size());
    for (size_t i = 0; i < robots.size(); ++i) {
        const auto& r = robots[i];
        if (r.start_time < 0) {
            throw std::invalid_argument("start times must be non-negative");
        }
        auto plan = plan_space_time(workspace, reservation, r.source, r.goal, r.start_time, horizon);
        if (plan) {
            reservation.reserve_path(*plan, static_cast<RobotId>(i));
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

}  // namespace sparcas
