#include <array>
#include <deque>
#include <queue>
#include <unordered_map>

#include "sparcas/oracle.hpp"

namespace sparcas::oracle {

namespace {

constexpr int kGone = -1;
using Joint = std::array<int, 3>;

// Steps from every cell to `goal` (-1 when unreachable), by BFS over
// reversed successor edges.
std::vector<int> steps_to(const Workspace& w, CellId goal) {
    std::vector<std::vector<int>> preds(static_cast<size_t>(w.cell_count()));
    for (int c = 0; c < w.cell_count(); ++c) {
        for (auto s : w.successors(CellId{c})) {
            preds[static_cast<size_t>(s.index)].push_back(c);
        }
    }
    std::vector<int> d(static_cast<size_t>(w.cell_count()), -1);
    std::deque<int> queue{goal.index};
    d[static_cast<size_t>(goal.index)] = 0;
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        for (int p : preds[static_cast<size_t>(c)]) {
            if (d[static_cast<size_t>(p)] < 0) {
                d[static_cast<size_t>(p)] = d[static_cast<size_t>(c)] + 1;
                queue.push_back(p);
            }
        }
    }
    return d;
}

class JointSearch {
public:
    JointSearch(const Workspace& w, std::span<const JointRobot> robots)
            : _w(w)
            , _n(robots.size()) {
        for (const auto& r : robots) {
            _goals.push_back(r.goal.index);
            _dist.push_back(steps_to(w, r.goal));
        }
        for (size_t i = 0; i < _n; ++i) {
            _start[i] = robots[i].start == robots[i].goal ? kGone : robots[i].start.index;
        }
    }

    // sum_of_costs: each step costs the number of robots still travelling;
    // otherwise each step costs 1 (makespan).
    int solve(bool sum_of_costs, int cap, size_t& expanded) {
        using Item = std::pair<int, std::uint64_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
        std::unordered_map<std::uint64_t, int> best;
        const auto start_key = encode(_start);
        best[start_key] = 0;
        open.push({heuristic(_start, sum_of_costs), start_key});
        while (!open.empty()) {
            auto [f, key] = open.top();
            open.pop();
            const Joint state = decode(key);
            const int g = best.at(key);
            if (f != g + heuristic(state, sum_of_costs)) {
                continue;
            }
            if (std::all_of(state.begin(), state.begin() + static_cast<long>(_n), [](int c) { return c == kGone; })) {
                return g;
            }
            ++expanded;
            if (g > cap) {
                throw OracleRefused("joint_optimal exceeded its step cap");
            }
            int travelling = 0;
            for (size_t i = 0; i < _n; ++i) {
                travelling += state[i] != kGone ? 1 : 0;
            }
            const int cost = sum_of_costs ? travelling : 1;
            for_each_successor(state, [&](const Joint& next) {
                const auto next_key = encode(next);
                const int ng = g + cost;
                auto it = best.find(next_key);
                if (it == best.end() || ng < it->second) {
                    best[next_key] = ng;
                    open.push({ng + heuristic(next, sum_of_costs), next_key});
                }
            });
        }
        throw OracleRefused("joint_optimal found no joint plan");
    }

private:
    std::uint64_t encode(const Joint& s) const {
        std::uint64_t key = 0;
        for (size_t i = 0; i < _n; ++i) {
            key = key * static_cast<std::uint64_t>(_w.cell_count() + 1) + static_cast<std::uint64_t>(s[i] + 1);
        }
        return key;
    }

    Joint decode(std::uint64_t key) const {
        Joint s{kGone, kGone, kGone};
        for (size_t i = _n; i-- > 0;) {
            s[i] = static_cast<int>(key % static_cast<std::uint64_t>(_w.cell_count() + 1)) - 1;
            key /= static_cast<std::uint64_t>(_w.cell_count() + 1);
        }
        return s;
    }

    int heuristic(const Joint& s, bool sum_of_costs) const {
        int h = 0;
        for (size_t i = 0; i < _n; ++i) {
            if (s[i] == kGone) {
                continue;
            }
            const int d = _dist[i][static_cast<size_t>(s[i])];
            h = sum_of_costs ? h + d : std::max(h, d);
        }
        return h;
    }

    template <typename Visit>
    void for_each_successor(const Joint& s, Visit&& visit) const {
        std::array<std::vector<int>, 3> options;
        for (size_t i = 0; i < _n; ++i) {
            if (s[i] == kGone) {
                options[i] = {kGone};
                continue;
            }
            options[i] = {s[i]};
            for (auto next : _w.successors(CellId{s[i]})) {
                if (_dist[i][static_cast<size_t>(next.index)] >= 0) {
                    options[i].push_back(next.index);
                }
            }
        }
        Joint pick{kGone, kGone, kGone};
        enumerate(s, options, 0, pick, visit);
    }

    template <typename Visit>
    void enumerate(const Joint& s, const std::array<std::vector<int>, 3>& options, size_t i, Joint& pick,
            Visit& visit) const {
        if (i == _n) {
            if (allowed(s, pick)) {
                Joint next = pick;
                for (size_t r = 0; r < _n; ++r) {
                    if (next[r] == _goals[r]) {
                        next[r] = kGone;
                    }
                }
                visit(next);
            }
            return;
        }
        for (int c : options[i]) {
            pick[i] = c;
            enumerate(s, options, i + 1, pick, visit);
        }
    }

    bool allowed(const Joint& from, const Joint& to) const {
        for (size_t a = 0; a < _n; ++a) {
            if (to[a] == kGone) {
                continue;
            }
            for (size_t b = a + 1; b < _n; ++b) {
                if (to[b] == kGone) {
                    continue;
                }
                if (to[a] == to[b]) {
                    return false;
                }
                if (to[a] == from[b] && to[b] == from[a] && from[a] != from[b]) {
                    return false;
                }
            }
        }
        std::vector<int> ring_load(_w.intersections().size(), 0);
        for (size_t a = 0; a < _n; ++a) {
            if (to[a] == kGone) {
                continue;
            }
            const auto& cell = _w.cell(CellId{to[a]});
            if (cell.kind == CellKind::RingSlot) {
                const auto k = static_cast<size_t>(cell.intersection);
                if (++ring_load[k] > _w.intersections()[k].capacity() - 1) {
                    return false;
                }
            }
        }
        return true;
    }

    const Workspace& _w;
    size_t _n;
    std::vector<int> _goals;
    std::vector<std::vector<int>> _dist;
    Joint _start{kGone, kGone, kGone};
};

}  // namespace

JointResult joint_optimal(const Workspace& workspace, std::span<const JointRobot> robots, int step_cap) {
    if (robots.size() > 3) {
        throw OracleRefused("joint_optimal refuses more than 3 robots");
    }
    if (workspace.width() > 16 || workspace.height() > 16) {
        throw OracleRefused("joint_optimal refuses workspaces larger than 16x16");
    }
    for (size_t i = 0; i < robots.size(); ++i) {
        for (auto c : {robots[i].start, robots[i].goal}) {
            if (!c.valid() || c.index >= workspace.cell_count() || !workspace.is_road(c)) {
                throw std::invalid_argument("joint_optimal: robot endpoints must be road cells");
            }
        }
        for (size_t j = 0; j < i; ++j) {
            if (robots[i].start == robots[j].start) {
                throw std::invalid_argument("joint_optimal: robots share a start cell");
            }
        }
    }
    JointSearch search(workspace, robots);
    JointResult result;
    result.sum_of_costs = search.solve(true, step_cap * static_cast<int>(std::max<size_t>(robots.size(), 1)),
            result.expanded);
    result.makespan = search.solve(false, step_cap, result.expanded);
    return result;
}

}  // namespace sparcas::oracle
