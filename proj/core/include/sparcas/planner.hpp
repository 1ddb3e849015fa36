#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sparcas/workspace.hpp"

namespace sparcas {

using RobotId = std::int32_t;

/// Cells from source to goal; consecutive cells are successor-related.
struct Path {
    std::vector<CellId> cells;

    size_t length() const { return cells.size(); }
    bool operator==(const Path&) const = default;
};

class UnreachableGoal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A* with the Manhattan heuristic. Ties on f are broken towards the smaller
/// CellId so plans are reproducible. Throws std::invalid_argument for an
/// invalid endpoint and UnreachableGoal when no directed path exists.
Path shortest_path(const Workspace& workspace, CellId source, CellId goal);

/// cells[k] is occupied at time start_time + k. The robot leaves the map once
/// it reaches the last cell.
struct TimedPath {
    int start_time = 0;
    std::vector<CellId> cells;

    int finish_time() const { return start_time + static_cast<int>(cells.size()) - 1; }
    CellId at(int t) const { return cells[static_cast<size_t>(t - start_time)]; }
    bool operator==(const TimedPath&) const = default;
};

/// (cell, time) occupancy plus directed edge usage, for the prioritized
/// baseline. At most one robot per (cell, time).
class Reservation {
public:
    bool vertex_free(CellId cell, int t) const;
    // False when moving from -> to between t and t + 1 would swap with a
    // reserved robot moving to -> from.
    bool edge_free(CellId from, CellId to, int t) const;

    // Throws std::logic_error if a vertex is already taken.
    void reserve(CellId cell, int t, RobotId robot);
    void reserve_path(const TimedPath& path, RobotId robot);
    std::optional<RobotId> occupant(CellId cell, int t) const;

private:
    static std::uint64_t key(CellId cell, int t) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t)) << 32) | static_cast<std::uint32_t>(cell.index);
    }
    std::unordered_map<std::uint64_t, RobotId> _vertices;
    // key(from, t) -> to for every reserved move starting at t.
    std::unordered_map<std::uint64_t, CellId> _moves;
};

struct PlanRequest {
    CellId source;
    CellId goal;
    int start_time = 0;
};

int default_horizon(const Workspace& workspace);

/// Space-time A* over (cell, t) with wait actions, avoiding reserved vertices
/// and swaps. The robot may also wait off the map before entering at its
/// source. Returns nullopt when the goal is not reached within `horizon` steps
/// of start_time.
std::optional<TimedPath> plan_space_time(const Workspace& workspace, const Reservation& reservation, CellId source,
        CellId goal, int start_time, int horizon);

/// Plans robots one at a time in list order (list order = priority); each
/// later robot treats earlier plans as moving obstacles. A robot that cannot
/// be planned gets nullopt and does not reserve anything.
std::vector<std::optional<TimedPath>> prioritized_plan(const Workspace& workspace,
        std::span<const PlanRequest> robots, int horizon, Reservation reservation = {});

inline std::vector<std::optional<TimedPath>> prioritized_plan(const Workspace& workspace,
        std::span<const PlanRequest> robots) {
    return prioritized_plan(workspace, robots, default_horizon(workspace));
}

}  // namespace sparcas
