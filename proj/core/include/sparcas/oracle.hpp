#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sparcas/mechanism.hpp"
#include "sparcas/planner.hpp"
#include "sparcas/workspace.hpp"

// Brute-force references for tests. Nothing here reuses the mechanism's
// feasibility code.
namespace sparcas::oracle {

class OracleRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr size_t max_auction_participants = 12;

/// Enumerates all 2^n stay/advance assignments, keeps the feasible ones and
/// returns the welfare maximizer (first in lexicographic order) with
/// externality payments. Refuses more than 12 participants.
AuctionOutcome oracle_auction(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked = {});

/// Number of feasible assignments found by exhaustive enumeration.
size_t oracle_feasible_count(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked = {});

using AuctionFn = std::function<AuctionOutcome(const Roundabout&, std::span<const Announcement>,
        std::span<const CellId>)>;

struct Deviation {
    RobotId robot = 0;
    Money true_value;
    Money misreport;
    Money truthful_payoff;
    Money deviant_payoff;
};

struct TruthfulnessVerdict {
    std::vector<Deviation> deviations;
    size_t misreports_checked = 0;

    bool truthful() const { return deviations.empty(); }
};

/// Integers 0..10, every participant's true value, rivals' bids +/- 1/1000
/// and the bid at which `robot` starts advancing +/- 1/1000. Non-negative,
/// sorted, without duplicates.
std::vector<Money> misreport_grid(const Roundabout& ring, std::span<const Announcement> truthful, RobotId robot,
        std::span<const CellId> blocked = {});

/// For every robot and every grid misreport (others truthful), compares the
/// true-value payoff of the misreport outcome with the truthful one. Any
/// strict gain is a deviation. `auction` defaults to sparcas_auction; `extra`
/// is added to every robot's grid. Refuses more than 5 participants.
TruthfulnessVerdict misreport_sweep(const Roundabout& ring, std::span<const Announcement> truthful,
        std::span<const CellId> blocked = {}, const AuctionFn& auction = {}, std::span<const Money> extra = {});

struct JointRobot {
    CellId start;
    CellId goal;
};

struct JointResult {
    // Sum over robots of the step at which each reaches its goal.
    int sum_of_costs = 0;
    // Smallest step by which all robots can be at their goals.
    int makespan = 0;
    size_t expanded = 0;
};

/// Exact joint-state search. All robots start at t = 0; each step every
/// robot waits or advances to a successor, cells stay exclusive, no swaps,
/// every roundabout holds at most m - 1 robots after each step, and a robot
/// leaves the map when it reaches its goal. Refuses more than 3 robots,
/// workspaces larger than 16x16 and instances needing more than `step_cap`
/// steps.
JointResult joint_optimal(const Workspace& workspace, std::span<const JointRobot> robots, int step_cap = 64);

}  // namespace sparcas::oracle
