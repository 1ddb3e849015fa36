#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sparcas/mechanism.hpp"
#include "sparcas/oracle.hpp"
#include "sparcas/simulator.hpp"

// Seeded generators for property suites and benchmarks.
namespace sparcas {

struct AuctionInstance {
    Roundabout ring;
    std::vector<Announcement> announcements;
    std::vector<CellId> blocked;
};

/// Synthetic roundabout with m in 3..6 slots (ring cells 0..m-1, entry lane
/// of slot p is 100 + p, exit lane is 200 + p) and `participants` robots
/// split between ring robots (at most m - 1) and entrants. Values mix class
/// valuations (t + 1) * w with small integers; each exit is blocked with
/// probability 1/4.
AuctionInstance random_auction_instance(std::mt19937_64& rng, int participants);

/// The four-robot roundabout of the deadlock example: two economy robots in
/// the ring (top-left heading down, bottom-right heading up) and two premium
/// robots entering from the east and west approaches, all at t = 0.
Scenario four_robot_fixture(MechanismKind mechanism);

struct TinyInstance {
    WorkspaceParams params;
    std::vector<oracle::JointRobot> robots;
};

/// 8x8 or 16x16 grid (block spacing 6) with 2 or 3 robots on distinct start
/// lanes, heading to distinct goal lanes.
TinyInstance random_tiny_instance(std::mt19937_64& rng);

/// Scenario where every robot starts at t = 0 on its shortest path.
Scenario tiny_scenario(const TinyInstance& instance, MechanismKind mechanism);

}  // namespace sparcas
