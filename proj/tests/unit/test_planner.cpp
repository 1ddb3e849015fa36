#include <deque>
#include <random>

#include <gtest/gtest.h>

#include "sparcas/planner.hpp"
#include "sparcas/simulator.hpp"

using namespace sparcas;

namespace {

int bfs_distance(const Workspace& w, CellId from, CellId to) {
    std::vector<int> d(static_cast<size_t>(w.cell_count()), -1);
    std::deque<CellId> queue{from};
    d[static_cast<size_t>(from.index)] = 0;
    while (!queue.empty()) {
        auto c = queue.front();
        queue.pop_front();
        for (auto s : w.successors(c)) {
            if (d[static_cast<size_t>(s.index)] < 0) {
                d[static_cast<size_t>(s.index)] = d[static_cast<size_t>(c.index)] + 1;
                queue.push_back(s);
            }
        }
    }
    return d[static_cast<size_t>(to.index)];
}

std::vector<CellId> lanes(const Workspace& w) {
    std::vector<CellId> out;
    for (const auto& c : w.cells()) {
        if (c.kind == CellKind::Lane) {
            out.push_back(c.id);
        }
    }
    return out;
}

// Positions of each timed path over the joint horizon; a robot occupies its
// cells from its start time through its finish.
bool replay_collision_free(const std::vector<TimedPath>& plans) {
    int end = 0;
    for (const auto& p : plans) {
        end = std::max(end, p.finish_time());
    }
    auto occupancy_at = [&](int t) {
        Occupancy occ;
        for (size_t i = 0; i < plans.size(); ++i) {
            if (t >= plans[i].start_time && t <= plans[i].finish_time()) {
                occ[static_cast<RobotId>(i)] = plans[i].at(t);
            }
        }
        return occ;
    };
    for (int t = 0; t < end; ++t) {
        if (detect_collision(occupancy_at(t), occupancy_at(t + 1)).collided()) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(Planner, SourceEqualsGoalIsLengthOne) {
    auto w = generate_grid(16, 16, 6);
    auto lane = lanes(w).front();
    EXPECT_EQ(shortest_path(w, lane, lane).length(), 1u);
}

TEST(Planner, StraightLaneIsKPlusOne) {
    auto w = generate_grid(16, 16, 6);
    for (auto start : lanes(w)) {
        CellId at = start;
        int k = 0;
        while (k < 3 && w.cell(w.successors(at)[0]).kind == CellKind::Lane &&
                w.cell(w.successors(at)[0]).direction == w.cell(start).direction) {
            at = w.successors(at)[0];
            ++k;
        }
        if (k == 3) {
            auto path = shortest_path(w, start, at);
            EXPECT_EQ(path.length(), 4u);
            return;
        }
    }
    FAIL() << "no straight stretch of three lane cells";
}

TEST(Planner, LengthsMatchBreadthFirstDistances) {
    auto w = generate_grid(16, 16, 6);
    auto road = lanes(w);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<size_t> pick(0, road.size() - 1);
    for (int i = 0; i < 50; ++i) {
        auto a = road[pick(rng)];
        auto b = road[pick(rng)];
        auto path = shortest_path(w, a, b);
        EXPECT_EQ(static_cast<int>(path.length()) - 1, bfs_distance(w, a, b));
        EXPECT_EQ(path.cells.front(), a);
        EXPECT_EQ(path.cells.back(), b);
        for (size_t j = 0; j + 1 < path.cells.size(); ++j) {
            auto succ = w.successors(path.cells[j]);
            EXPECT_NE(std::find(succ.begin(), succ.end(), path.cells[j + 1]), succ.end());
        }
    }
}

TEST(Planner, ErrorsOnInvalidOrUnreachableEndpoints) {
    auto w = generate_grid(16, 16, 6);
    auto lane = lanes(w).front();
    EXPECT_THROW(shortest_path(w, CellId{-1}, lane), std::invalid_argument);
    EXPECT_THROW(shortest_path(w, lane, CellId{w.cell_count()}), std::invalid_argument);
    EXPECT_THROW(shortest_path(w, lane, w.service_cells().front()), UnreachableGoal);
}

TEST(Planner, SingleRobotMatchesShortestPath) {
    auto w = generate_grid(16, 16, 6);
    auto road = lanes(w);
    PlanRequest req{road[3], road[40], 5};
    auto plans = prioritized_plan(w, std::span(&req, 1));
    ASSERT_TRUE(plans[0].has_value());
    EXPECT_EQ(plans[0]->start_time, 5);
    EXPECT_EQ(plans[0]->cells, shortest_path(w, req.source, req.goal).cells);
}

TEST(Planner, PerpendicularCrossingForcesAWait) {
    auto w = generate_grid(8, 8, 6);
    // Cells 11 (south-bound, above the ring) and 25 (east-bound, left of the
    // ring) both reach ring slot 27 two steps in.
    std::vector<PlanRequest> reqs{{CellId{11}, CellId{29}, 0}, {CellId{25}, CellId{35}, 0}};
    auto solo0 = shortest_path(w, reqs[0].source, reqs[0].goal);
    auto solo1 = shortest_path(w, reqs[1].source, reqs[1].goal);
    auto plans = prioritized_plan(w, reqs);
    ASSERT_TRUE(plans[0] && plans[1]);
    EXPECT_EQ(plans[0]->cells, solo0.cells);
    EXPECT_GE(plans[1]->cells.size(), solo1.cells.size() + 1);
    EXPECT_TRUE(replay_collision_free({*plans[0], *plans[1]}));
}

TEST(Planner, ManyRobotsReplayCollisionFree) {
    auto w = generate_grid(16, 16, 6);
    auto road = lanes(w);
    std::mt19937_64 rng(3);
    std::shuffle(road.begin(), road.end(), rng);
    std::vector<PlanRequest> reqs;
    for (int i = 0; i < 12; ++i) {
        reqs.push_back({road[static_cast<size_t>(i)], road[static_cast<size_t>(i + 12)], i % 3});
    }
    auto plans = prioritized_plan(w, reqs);
    std::vector<TimedPath> ok;
    for (const auto& p : plans) {
        if (p) {
            ok.push_back(*p);
        }
    }
    EXPECT_GE(ok.size(), 10u);
    EXPECT_TRUE(replay_collision_free(ok));
}

TEST(Planner, ReservedCorridorYieldsFailure) {
    auto w = generate_grid(8, 8, 6);
    // Lanes 45 -> 46 -> 42 -> 36 form the only way north from the bottom
    // edge; holding 46 for the whole horizon makes the goal unreachable.
    Reservation blocked;
    const int horizon = 40;
    for (int t = 0; t <= horizon + 1; ++t) {
        blocked.reserve(CellId{46}, t, 99);
    }
    std::vector<PlanRequest> reqs{{CellId{45}, CellId{36}, 0}};
    auto plans = prioritized_plan(w, reqs, horizon, blocked);
    EXPECT_FALSE(plans[0].has_value());
}

TEST(Planner, ReservationTracksVerticesAndEdges) {
    Reservation r;
    TimedPath p{2, {CellId{1}, CellId{2}, CellId{3}}};
    r.reserve_path(p, 7);
    EXPECT_FALSE(r.vertex_free(CellId{2}, 3));
    EXPECT_TRUE(r.vertex_free(CellId{2}, 4));
    EXPECT_EQ(r.occupant(CellId{1}, 2), 7);
    EXPECT_FALSE(r.edge_free(CellId{2}, CellId{1}, 2));
}
