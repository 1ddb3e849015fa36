#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sparcas {

/// Index of a slot in a workspace, in [0, S).
struct CellId {
    std::int32_t index = -1;

    constexpr auto operator<=>(const CellId&) const = default;
    constexpr bool valid() const { return index >= 0; }
};

enum class Direction : std::uint8_t { North, East, South, West };

enum class CellKind : std::uint8_t { Lane, RingSlot, Service };

struct Cell {
    CellId id;
    CellKind kind = CellKind::Lane;
    // Travel direction for lanes; unused otherwise.
    Direction direction = Direction::North;
    // Roundabout index and position in its ring for ring slots, -1 otherwise.
    int intersection = -1;
    int ring_position = -1;
    int row = 0;
    int col = 0;

    bool operator==(const Cell&) const = default;
};

/// A ring of m slots with unidirectional flow; stands in for a graph vertex
/// of degree three or more.
struct Roundabout {
    int id = 0;
    // Traversal order: ring[p] flows into ring[(p + 1) % m].
    std::vector<CellId> ring;
    // Approach lane cell -> ring position it enters.
    std::map<CellId, int> entries;
    // Ring position -> departure lane cell.
    std::map<int, CellId> exits;

    int capacity() const { return static_cast<int>(ring.size()); }
    std::optional<int> position_of(CellId cell) const;
    bool contains(CellId cell) const { return position_of(cell).has_value(); }
    CellId next_slot(int position) const { return ring[static_cast<size_t>((position + 1) % capacity())]; }

    bool operator==(const Roundabout&) const = default;
};

class WorkspaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, std::string field, const std::string& message);

    int line() const { return _line; }
    const std::string& field() const { return _field; }

private:
    int _line;
    std::string _field;
};

/// Directed slot graph with lane cells, roundabout rings and service cells.
/// Immutable after construction.
class Workspace {
public:
    // Validates every structural invariant and throws WorkspaceError on the
    // first violation.
    Workspace(int width, int height, std::vector<Cell> cells, std::vector<Roundabout> intersections,
            std::vector<std::vector<CellId>> successors);

    int width() const { return _width; }
    int height() const { return _height; }
    int cell_count() const { return static_cast<int>(_cells.size()); }

    const std::vector<Cell>& cells() const { return _cells; }
    const Cell& cell(CellId id) const;
    const std::vector<Roundabout>& intersections() const { return _intersections; }
    const Roundabout& intersection(int k) const;

    // Legal next cells under the traffic rules. Throws std::out_of_range on an
    // invalid id.
    std::span<const CellId> successors(CellId id) const;

    // Intersection that owns the ring slot, if any.
    std::optional<int> intersection_of(CellId id) const;
    bool is_road(CellId id) const;

    std::optional<CellId> cell_at(int row, int col) const;

    const std::vector<CellId>& service_cells() const { return _service_cells; }
    // Lane cell a service cell is attached to.
    CellId access_lane(CellId service) const;

    bool operator==(const Workspace& other) const;

private:
    void validate() const;

    int _width;
    int _height;
    std::vector<Cell> _cells;
    std::vector<Roundabout> _intersections;
    std::vector<std::vector<CellId>> _successors;
    std::vector<CellId> _service_cells;
    std::map<std::pair<int, int>, CellId> _by_coordinates;
};

/// Regular road pattern: two-cell-wide bands (one lane per direction) with
/// `block_spacing` block cells between neighbouring bands, a half block of
/// margin at the border, U-turns where a band meets the edge, and a four-slot
/// counter-clockwise roundabout at every band crossing. Sizes round down to a
/// multiple of block_spacing + 2; the actual size is width()/height().
Workspace generate_grid(int width, int height, int block_spacing = 8);

std::string serialize(const Workspace& workspace);
Workspace parse_workspace(std::string_view text);

}  // namespace sparcas

template <>
struct std::hash<sparcas::CellId> {
    size_t operator()(const sparcas::CellId& c) const noexcept { return std::hash<std::int32_t>{}(c.index); }
};
