#include "sparcas/workspace.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace sparcas {

std::optional<int> Roundabout::position_of(CellId cell) const {
    for (size_t p = 0; p < ring.size(); ++p) {
        if (ring[p] == cell) {
            return static_cast<int>(p);
        }
    }
    return std::nullopt;
}

ParseError::ParseError(int line, std::string field, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + message)
        , _line(line)
        , _field(std::move(field)) {}

Workspace::Workspace(int width, int height, std::vector<Cell> cells, std::vector<Roundabout> intersections,
        std::vector<std::vector<CellId>> successors)
        : _width(width)
        , _height(height)
        , _cells(std::move(cells))
        , _intersections(std::move(intersections))
        , _successors(std::move(successors)) {
    for (const auto& c : _cells) {
        if (c.kind == CellKind::Service) {
            _service_cells.push_back(c.id);
        }
        _by_coordinates.emplace(std::pair{c.row, c.col}, c.id);
    }
    validate();
}

const Cell& Workspace::cell(CellId id) const {
    if (id.index < 0 || id.index >= cell_count()) {
        throw std::out_of_range("invalid cell id " + std::to_string(id.index));
    }
    return _cells[static_cast<size_t>(id.index)];
}

const Roundabout& Workspace::intersection(int k) const {
    if (k < 0 || k >= static_cast<int>(_intersections.size())) {
        throw std::out_of_range("invalid intersection " + std::to_string(k));
    }
    return _intersections[static_cast<size_t>(k)];
}

std::span<const CellId> Workspace::successors(CellId id) const {
    cell(id);
    return _successors[static_cast<size_t>(id.index)];
}

std::optional<int> Workspace::intersection_of(CellId id) const {
    const auto& c = cell(id);
    if (c.kind != CellKind::RingSlot) {
        return std::nullopt;
    }
    return c.intersection;
}

bool Workspace::is_road(CellId id) const {
    return cell(id).kind != CellKind::Service;
}

std::optional<CellId> Workspace::cell_at(int row, int col) const {
    auto it = _by_coordinates.find({row, col});
    if (it == _by_coordinates.end()) {
        return std::nullopt;
    }
    return it->second;
}

CellId Workspace::access_lane(CellId service) const {
    const auto& c = cell(service);
    if (c.kind != CellKind::Service) {
        throw std::invalid_argument("cell " + std::to_string(service.index) + " is not a service cell");
    }
    return _successors[static_cast<size_t>(service.index)].front();
}

bool Workspace::operator==(const Workspace& other) const {
    return _width == other._width && _height == other._height && _cells == other._cells &&
           _intersections == other._intersections && _successors == other._successors;
}

void Workspace::validate() const {
    auto fail = [](const std::string& what) { throw WorkspaceError(what); };
    auto valid_id = [&](CellId id) { return id.index >= 0 && id.index < cell_count(); };
    auto name = [](CellId id) { return "cell " + std::to_string(id.index); };

    if (_width <= 0 || _height <= 0) {
        fail("workspace dimensions must be positive");
    }
    if (_successors.size() != _cells.size()) {
        fail("successor table size does not match cell count");
    }
    if (_by_coordinates.size() != _cells.size()) {
        fail("two cells share coordinates");
    }
    for (size_t i = 0; i < _cells.size(); ++i) {
        const auto& c = _cells[i];
        if (c.id.index != static_cast<int>(i)) {
            fail("cell ids must be dense and ordered; found " + name(c.id) + " at index " + std::to_string(i));
        }
        if (c.row < 0 || c.row >= _height || c.col < 0 || c.col >= _width) {
            fail(name(c.id) + " lies outside the workspace");
        }
        for (auto s : _successors[i]) {
            if (!valid_id(s)) {
                fail(name(c.id) + " lists an invalid successor " + std::to_string(s.index));
            }
        }
    }

    std::vector<int> road_predecessors(_cells.size(), 0);
    for (const auto& c : _cells) {
        const auto& succ = _successors[static_cast<size_t>(c.id.index)];
        switch (c.kind) {
        case CellKind::Lane:
            if (succ.size() != 1) {
                fail("lane " + name(c.id) + " must have exactly one successor");
            }
            if (_cells[static_cast<size_t>(succ[0].index)].kind == CellKind::Service) {
                fail("lane " + name(c.id) + " flows into a service cell");
            }
            break;
        case CellKind::Service:
            if (succ.size() != 1 || _cells[static_cast<size_t>(succ[0].index)].kind != CellKind::Lane) {
                fail("service " + name(c.id) + " must have exactly one lane successor");
            }
            continue;
        case CellKind::RingSlot:
            if (c.intersection < 0 || c.intersection >= static_cast<int>(_intersections.size())) {
                fail("ring " + name(c.id) + " references a missing roundabout");
            }
            {
                const auto& r = _intersections[static_cast<size_t>(c.intersection)];
                if (c.ring_position < 0 || c.ring_position >= r.capacity() ||
                        r.ring[static_cast<size_t>(c.ring_position)] != c.id) {
                    fail("ring " + name(c.id) + " is not at its declared ring position");
                }
            }
            break;
        }
        for (auto s : succ) {
            road_predecessors[static_cast<size_t>(s.index)] += 1;
        }
    }
    for (const auto& c : _cells) {
        if (c.kind == CellKind::Lane && road_predecessors[static_cast<size_t>(c.id.index)] > 1) {
            fail("lane " + name(c.id) + " has more than one predecessor");
        }
    }

    for (size_t k = 0; k < _intersections.size(); ++k) {
        const auto& r = _intersections[k];
        std::string rname = "roundabout " + std::to_string(k);
        if (r.id != static_cast<int>(k)) {
            fail(rname + " has mismatched id " + std::to_string(r.id));
        }
        if (r.capacity() < 3) {
            fail(rname + " needs at least 3 ring slots");
        }
        std::set<CellId> distinct(r.ring.begin(), r.ring.end());
        if (distinct.size() != r.ring.size()) {
            fail(rname + " repeats a ring slot");
        }
        for (int p = 0; p < r.capacity(); ++p) {
            CellId slot = r.ring[static_cast<size_t>(p)];
            if (!valid_id(slot) || _cells[static_cast<size_t>(slot.index)].kind != CellKind::RingSlot ||
                    _cells[static_cast<size_t>(slot.index)].intersection != r.id) {
                fail(rname + " ring slot " + std::to_string(p) + " is not a ring cell of this roundabout");
            }
            std::set<CellId> expected{r.next_slot(p)};
            if (auto e = r.exits.find(p); e != r.exits.end()) {
                expected.insert(e->second);
            }
            const auto& succ = _successors[static_cast<size_t>(slot.index)];
            std::set<CellId> actual(succ.begin(), succ.end());
            if (actual != expected || actual.size() != succ.size()) {
                fail(rname + " ring slot " + std::to_string(p) + " successors disagree with ring order and exits");
            }
        }
        for (const auto& [lane, pos] : r.entries) {
            if (!valid_id(lane) || _cells[static_cast<size_t>(lane.index)].kind != CellKind::Lane) {
                fail(rname + " entry " + std::to_string(lane.index) + " is not a lane cell");
            }
            if (pos < 0 || pos >= r.capacity()) {
                fail(rname + " entry targets ring position out of range");
            }
            if (_successors[static_cast<size_t>(lane.index)].front() != r.ring[static_cast<size_t>(pos)]) {
                fail(rname + " entry lane " + std::to_string(lane.index) + " does not flow into its ring slot");
            }
        }
        for (const auto& [pos, lane] : r.exits) {
            if (pos < 0 || pos >= r.capacity()) {
                fail(rname + " exit from ring position out of range");
            }
            if (!valid_id(lane) || _cells[static_cast<size_t>(lane.index)].kind != CellKind::Lane) {
                fail(rname + " exit " + std::to_string(lane.index) + " is not a lane cell");
            }
        }
    }

    // Every lane that flows into a ring must be registered as that ring's entry.
    for (const auto& c : _cells) {
        if (c.kind != CellKind::Lane) {
            continue;
        }
        CellId next = _successors[static_cast<size_t>(c.id.index)].front();
        const auto& n = _cells[static_cast<size_t>(next.index)];
        if (n.kind == CellKind::RingSlot) {
            const auto& r = _intersections[static_cast<size_t>(n.intersection)];
            auto it = r.entries.find(c.id);
            if (it == r.entries.end() || it->second != n.ring_position) {
                fail("lane " + name(c.id) + " enters a ring without an entry record");
            }
        }
    }
}

namespace {

struct GridLayout {
    int width;
    int height;
    int period;
    int margin;
    int bands_x;
    int bands_y;

    // Band index containing this row/column and the offset (0 or 1) inside it.
    std::optional<int> band_offset(int coordinate) const {
        int shifted = coordinate - margin;
        if (shifted < 0) {
            return std::nullopt;
        }
        int offset = shifted % period;
        return offset < 2 ? std::optional<int>(offset) : std::nullopt;
    }
    bool horizontal_road(int row) const { return band_offset(row).has_value(); }
    bool vertical_road(int col) const { return band_offset(col).has_value(); }
    bool road(int row, int col) const { return horizontal_road(row) || vertical_road(col); }
};

}  // namespace

Workspace generate_grid(int width, int height, int block_spacing) {
    if (block_spacing < 2) {
        throw WorkspaceError("block_spacing must be at least 2 (got " + std::to_string(block_spacing) + ")");
    }
    if (width < 8 || height < 8) {
        throw WorkspaceError("workspace must be at least 8x8 (got " + std::to_string(width) + "x" +
                             std::to_string(height) + ")");
    }
    GridLayout g;
    g.period = block_spacing + 2;
    g.margin = block_spacing / 2;
    g.bands_x = width / g.period;
    g.bands_y = height / g.period;
    if (g.bands_x == 0 || g.bands_y == 0) {
        throw WorkspaceError("a " + std::to_string(width) + "x" + std::to_string(height) +
                             " workspace cannot fit one roundabout with block_spacing " +
                             std::to_string(block_spacing) + "; need at least " + std::to_string(g.period) +
                             " cells per side");
    }
    g.width = g.bands_x * g.period;
    g.height = g.bands_y * g.period;

    // Classify grid positions and assign ids in row-major order.
    std::vector<std::vector<int>> id_at(static_cast<size_t>(g.height), std::vector<int>(static_cast<size_t>(g.width), -1));
    std::vector<Cell> cells;
    auto is_lane = [&](int r, int c) { return g.road(r, c) && !(g.horizontal_road(r) && g.vertical_road(c)); };
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            Cell cell;
            cell.row = r;
            cell.col = c;
            if (g.horizontal_road(r) && g.vertical_road(c)) {
                cell.kind = CellKind::RingSlot;
            } else if (g.horizontal_road(r)) {
                cell.kind = CellKind::Lane;
                cell.direction = *g.band_offset(r) == 0 ? Direction::West : Direction::East;
            } else if (g.vertical_road(c)) {
                cell.kind = CellKind::Lane;
                cell.direction = *g.band_offset(c) == 0 ? Direction::South : Direction::North;
            } else {
                constexpr std::array<std::pair<int, int>, 4> around{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
                bool next_to_lane = std::any_of(around.begin(), around.end(), [&](auto d) {
                    int rr = r + d.first;
                    int cc = c + d.second;
                    return rr >= 0 && rr < g.height && cc >= 0 && cc < g.width && is_lane(rr, cc);
                });
                if (!next_to_lane) {
                    continue;
                }
                cell.kind = CellKind::Service;
            }
            cell.id = CellId{static_cast<std::int32_t>(cells.size())};
            id_at[static_cast<size_t>(r)][static_cast<size_t>(c)] = cell.id.index;
            cells.push_back(cell);
        }
    }
    auto at = [&](int r, int c) { return CellId{id_at[static_cast<size_t>(r)][static_cast<size_t>(c)]}; };

    // Roundabouts: ring order TR -> TL -> BL -> BR (counter-clockwise on screen).
    std::vector<Roundabout> rings;
    for (int by = 0; by < g.bands_y; ++by) {
        for (int bx = 0; bx < g.bands_x; ++bx) {
            int r = g.margin + by * g.period;
            int c = g.margin + bx * g.period;
            Roundabout ra;
            ra.id = static_cast<int>(rings.size());
            ra.ring = {at(r, c + 1), at(r, c), at(r + 1, c), at(r + 1, c + 1)};
            ra.entries = {
                {at(r, c + 2), 0},      // westbound
                {at(r - 1, c), 1},      // southbound
                {at(r + 1, c - 1), 2},  // eastbound
                {at(r + 2, c + 1), 3},  // northbound
            };
            ra.exits = {
                {0, at(r - 1, c + 1)},  // north
                {1, at(r, c - 1)},      // west
                {2, at(r + 2, c)},      // south
                {3, at(r + 1, c + 2)},  // east
            };
            for (int p = 0; p < 4; ++p) {
                auto& slot = cells[static_cast<size_t>(ra.ring[static_cast<size_t>(p)].index)];
                slot.intersection = ra.id;
                slot.ring_position = p;
            }
            rings.push_back(std::move(ra));
        }
    }

    std::vector<std::vector<CellId>> successors(cells.size());
    for (const auto& cell : cells) {
        auto& out = successors[static_cast<size_t>(cell.id.index)];
        int r = cell.row;
        int c = cell.col;
        switch (cell.kind) {
        case CellKind::Lane:
            switch (cell.direction) {
            case Direction::West:
                out.push_back(c > 0 ? at(r, c - 1) : at(r + 1, c));
                break;
            case Direction::East:
                out.push_back(c + 1 < g.width ? at(r, c + 1) : at(r - 1, c));
                break;
            case Direction::South:
                out.push_back(r + 1 < g.height ? at(r + 1, c) : at(r, c + 1));
                break;
            case Direction::North:
                out.push_back(r > 0 ? at(r - 1, c) : at(r, c - 1));
                break;
            }
            break;
        case CellKind::RingSlot: {
            const auto& ra = rings[static_cast<size_t>(cell.intersection)];
            out.push_back(ra.next_slot(cell.ring_position));
            if (auto e = ra.exits.find(cell.ring_position); e != ra.exits.end()) {
                out.push_back(e->second);
            }
            break;
        }
        case CellKind::Service: {
            CellId best;
            constexpr std::array<std::pair<int, int>, 4> around{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
            for (auto [dr, dc] : around) {
                int rr = r + dr;
                int cc = c + dc;
                if (rr >= 0 && rr < g.height && cc >= 0 && cc < g.width && is_lane(rr, cc)) {
                    CellId candidate = at(rr, cc);
                    if (!best.valid() || candidate < best) {
                        best = candidate;
                    }
                }
            }
            out.push_back(best);
            break;
        }
        }
    }

    return Workspace(g.width, g.height, std::move(cells), std::move(rings), std::move(successors));
}

}  // namespace sparcas
