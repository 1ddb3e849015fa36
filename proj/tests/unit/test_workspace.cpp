#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "sparcas/workspace.hpp"

using namespace sparcas;

namespace {

std::string read_file(const std::string& name) {
    std::ifstream in(std::string(SPARCAS_TEST_DATA) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<int, int> step_of(Direction d) {
    switch (d) {
    case Direction::North:
        return {-1, 0};
    case Direction::East:
        return {0, 1};
    case Direction::South:
        return {1, 0};
    case Direction::West:
        return {0, -1};
    }
    return {0, 0};
}

Direction opposite(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

// Successors derived from coordinates and cell kinds alone: a lane moves
// forward onto road, otherwise turns onto the adjacent lane running the
// other way; a ring slot rotates counterclockwise within its 2x2 block and
// leaves onto any adjacent lane pointing away from it.
std::set<CellId> derived_successors(const Workspace& w, const Cell& c) {
    auto road_at = [&](int r, int col) -> std::optional<Cell> {
        auto id = w.cell_at(r, col);
        if (!id || w.cell(*id).kind == CellKind::Service) {
            return std::nullopt;
        }
        return w.cell(*id);
    };
    std::set<CellId> out;
    if (c.kind == CellKind::Lane) {
        auto [dr, dc] = step_of(c.direction);
        if (auto ahead = road_at(c.row + dr, c.col + dc)) {
            out.insert(ahead->id);
            return out;
        }
        for (auto d : {Direction::North, Direction::East, Direction::South, Direction::West}) {
            auto [sr, sc] = step_of(d);
            auto side = road_at(c.row + sr, c.col + sc);
            if (side && side->kind == CellKind::Lane && side->direction == opposite(c.direction)) {
                out.insert(side->id);
            }
        }
        return out;
    }
    if (c.kind == CellKind::RingSlot) {
        const bool top = !road_at(c.row - 1, c.col) || road_at(c.row - 1, c.col)->kind != CellKind::RingSlot;
        const bool left = !road_at(c.row, c.col - 1) || road_at(c.row, c.col - 1)->kind != CellKind::RingSlot;
        Direction flow = top ? (left ? Direction::South : Direction::West) : (left ? Direction::East : Direction::North);
        auto [fr, fc] = step_of(flow);
        out.insert(road_at(c.row + fr, c.col + fc)->id);
        for (auto d : {Direction::North, Direction::East, Direction::South, Direction::West}) {
            auto [sr, sc] = step_of(d);
            auto n = road_at(c.row + sr, c.col + sc);
            if (n && n->kind == CellKind::Lane && n->direction == d) {
                out.insert(n->id);
            }
        }
    }
    return out;
}

// Counts lane crossings from the serialized text: every horizontal band is
// a pair of rows holding W/E lanes, every vertical band a pair of columns
// holding N/S lanes.
int count_crossings(const std::string& text) {
    std::set<int> horizontal_rows;
    std::set<int> vertical_cols;
    std::set<std::pair<int, int>> ring_cells;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        std::string kind;
        int id = 0;
        ls >> word >> id >> kind;
        if (word != "cell") {
            continue;
        }
        if (kind == "lane") {
            std::string dir;
            int row = 0;
            int col = 0;
            ls >> dir >> row >> col;
            (dir == "W" || dir == "E" ? horizontal_rows : vertical_cols).insert(dir == "W" || dir == "E" ? row : col);
        } else if (kind == "ring") {
            int k = 0;
            int pos = 0;
            int row = 0;
            int col = 0;
            ls >> k >> pos >> row >> col;
            ring_cells.insert({row, col});
        }
    }
    int crossings = 0;
    for (int r : horizontal_rows) {
        for (int c : vertical_cols) {
            if (ring_cells.contains({r, c})) {
                ++crossings;
            }
        }
    }
    return crossings / 4;
}

}  // namespace

TEST(Workspace, SixteenGridHasFourRoundaboutsOfFour) {
    auto w = generate_grid(16, 16, 6);
    ASSERT_EQ(w.intersections().size(), 4u);
    for (const auto& r : w.intersections()) {
        EXPECT_EQ(r.capacity(), 4);
        EXPECT_EQ(r.entries.size(), 4u);
        EXPECT_EQ(r.exits.size(), 4u);
    }
}

TEST(Workspace, SixteenGridAdjacencyMatchesGeometry) {
    auto w = generate_grid(16, 16, 6);
    for (const auto& c : w.cells()) {
        auto succ = w.successors(c.id);
        std::set<CellId> actual(succ.begin(), succ.end());
        if (c.kind == CellKind::Service) {
            ASSERT_EQ(actual.size(), 1u);
            const auto& lane = w.cell(*actual.begin());
            EXPECT_EQ(lane.kind, CellKind::Lane);
            EXPECT_EQ(std::abs(lane.row - c.row) + std::abs(lane.col - c.col), 1);
            continue;
        }
        EXPECT_EQ(actual, derived_successors(w, c)) << "cell " << c.id.index;
    }
}

TEST(Workspace, LaneMidEdgeHasOneSuccessorAndExitSlotHasTwo) {
    auto w = generate_grid(16, 16, 6);
    for (const auto& c : w.cells()) {
        if (c.kind == CellKind::Lane) {
            EXPECT_EQ(w.successors(c.id).size(), 1u);
        }
    }
    const auto& r = w.intersections().front();
    for (int p = 0; p < r.capacity(); ++p) {
        EXPECT_EQ(w.successors(r.ring[static_cast<size_t>(p)]).size(), r.exits.contains(p) ? 2u : 1u);
    }
}

TEST(Workspace, HundredGridCrossingsRecountedFromText) {
    auto w = generate_grid(100, 100, 8);
    const auto text = serialize(w);
    EXPECT_EQ(count_crossings(text), static_cast<int>(w.intersections().size()));
    EXPECT_EQ(w.intersections().size(), 100u);
}

TEST(Workspace, SerializeRoundTrip) {
    auto w = generate_grid(16, 16, 6);
    auto back = parse_workspace(serialize(w));
    EXPECT_EQ(back, w);
    EXPECT_EQ(serialize(back), serialize(w));
}

TEST(Workspace, GoldenSerializationIsStable) {
    EXPECT_EQ(serialize(generate_grid(8, 8, 6)), read_file("grid_8x8_s6.ws"));
}

TEST(Workspace, HandWrittenSingleRoundabout) {
    auto w = parse_workspace(read_file("one_roundabout.ws"));
    ASSERT_EQ(w.intersections().size(), 1u);
    EXPECT_EQ(w.intersections()[0].capacity(), 4);
    EXPECT_EQ(w.service_cells().size(), 1u);
    EXPECT_EQ(w.intersection_of(CellId{3}), 0);
    EXPECT_FALSE(w.intersection_of(CellId{5}).has_value());
}

TEST(Workspace, EmptyTextIsAParseError) {
    try {
        parse_workspace("");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_GE(e.line(), 1);
        EXPECT_EQ(e.field(), "header");
    }
}

TEST(Workspace, BadIntegerReportsLine) {
    auto text = read_file("one_roundabout.ws");
    text.replace(text.find("size 4 3"), 8, "size x 3");
    try {
        parse_workspace(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Workspace, StructuralErrorsAreRejected) {
    auto text = read_file("one_roundabout.ws");
    // The entry lane no longer flows into its ring slot.
    text.replace(text.find("cell 5 lane W 1 3 -> 4"), 22, "cell 5 lane W 1 3 -> 1");
    EXPECT_THROW(parse_workspace(text), ParseError);
}

TEST(Workspace, LargerRoundaboutIsSupported) {
    // A six-slot ring laid out as a 2x3 block with one entry and one exit.
    std::vector<Cell> cells;
    auto add = [&](CellKind kind, int row, int col, Direction d = Direction::North, int k = -1, int pos = -1) {
        Cell c;
        c.id = CellId{static_cast<int>(cells.size())};
        c.kind = kind;
        c.row = row;
        c.col = col;
        c.direction = d;
        c.intersection = k;
        c.ring_position = pos;
        cells.push_back(c);
        return c.id;
    };
    auto r0 = add(CellKind::RingSlot, 1, 2, Direction::North, 0, 0);
    auto r1 = add(CellKind::RingSlot, 1, 1, Direction::North, 0, 1);
    auto r2 = add(CellKind::RingSlot, 1, 0, Direction::North, 0, 2);
    auto r3 = add(CellKind::RingSlot, 2, 0, Direction::North, 0, 3);
    auto r4 = add(CellKind::RingSlot, 2, 1, Direction::North, 0, 4);
    auto r5 = add(CellKind::RingSlot, 2, 2, Direction::North, 0, 5);
    auto out = add(CellKind::Lane, 0, 2, Direction::North);
    auto turn = add(CellKind::Lane, 0, 3, Direction::South);
    auto in = add(CellKind::Lane, 1, 3, Direction::West);
    auto svc = add(CellKind::Service, 0, 1);
    Roundabout r;
    r.id = 0;
    r.ring = {r0, r1, r2, r3, r4, r5};
    r.entries[in] = 0;
    r.exits[0] = out;
    std::vector<std::vector<CellId>> succ(cells.size());
    succ[0] = {r1, out};
    succ[1] = {r2};
    succ[2] = {r3};
    succ[3] = {r4};
    succ[4] = {r5};
    succ[5] = {r0};
    succ[static_cast<size_t>(out.index)] = {turn};
    succ[static_cast<size_t>(turn.index)] = {in};
    succ[static_cast<size_t>(in.index)] = {r0};
    succ[static_cast<size_t>(svc.index)] = {out};
    Workspace w(4, 3, cells, {r}, succ);
    EXPECT_EQ(w.intersections()[0].capacity(), 6);
    auto back = parse_workspace(serialize(w));
    EXPECT_EQ(back, w);
    EXPECT_EQ(back.intersection(0).next_slot(5), r0);
}

TEST(Workspace, GeneratorRejectsBadDimensions) {
    EXPECT_THROW(generate_grid(0, 10, 8), WorkspaceError);
    EXPECT_THROW(generate_grid(10, -1, 8), WorkspaceError);
}
