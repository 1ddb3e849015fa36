// Text format for workspaces. Grammar (one record per line, '#' starts a
// comment line, blank lines are ignored):
//
//   sparcas-workspace 1
//   size <width> <height>
//   capacity <m>
//   cells <S>
//   cell <id> lane <N|E|S|W> <row> <col> -> <successor ids...>
//   cell <id> ring <k> <position> <row> <col> -> <successor ids...>
//   cell <id> service <row> <col> -> <access lane id>
//   roundabouts <K>
//   roundabout <k> ring <m cell ids in traversal order>
//   entry <k> <lane id> <ring position>
//   exit <k> <ring position> <lane id>
//   end
//
// Cell records appear in id order; entry/exit records follow their roundabout.

#include <charconv>
#include <sstream>

#include "sparcas/workspace.hpp"

namespace sparcas {

namespace {

char direction_letter(Direction d) {
    switch (d) {
    case Direction::North:
        return 'N';
    case Direction::East:
        return 'E';
    case Direction::South:
        return 'S';
    case Direction::West:
        return 'W';
    }
    return '?';
}

void append_successors(std::ostringstream& out, std::span<const CellId> successors) {
    out << " ->";
    for (auto s : successors) {
        out << ' ' << s.index;
    }
    out << '\n';
}

class LineReader {
public:
    explicit LineReader(std::string_view text)
            : _text(text) {}

    // Next non-blank, non-comment line split into tokens; empty at EOF.
    std::vector<std::string_view> next() {
        while (_pos < _text.size()) {
            size_t end = _text.find('\n', _pos);
            if (end == std::string_view::npos) {
                end = _text.size();
            }
            std::string_view line = _text.substr(_pos, end - _pos);
            _pos = end + 1;
            ++_line;
            if (!line.empty() && line.back() == '\r') {
                line.remove_suffix(1);
            }
            auto tokens = split(line);
            if (tokens.empty() || tokens.front().front() == '#') {
                continue;
            }
            return tokens;
        }
        ++_line;
        return {};
    }

    int line() const { return _line; }

private:
    static std::vector<std::string_view> split(std::string_view line) {
        std::vector<std::string_view> tokens;
        size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
                ++i;
            }
            size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
                ++i;
            }
            if (i > start) {
                tokens.push_back(line.substr(start, i - start));
            }
        }
        return tokens;
    }

    std::string_view _text;
    size_t _pos = 0;
    int _line = 0;
};

int parse_int(std::string_view token, int line, const std::string& field) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError(line, field, "expected an integer, got '" + std::string(token) + "'");
    }
    return value;
}

void expect_keyword(const std::vector<std::string_view>& tokens, std::string_view keyword, size_t arity, int line) {
    if (tokens.empty()) {
        throw ParseError(line, std::string(keyword), "unexpected end of input");
    }
    if (tokens[0] != keyword) {
        throw ParseError(line, std::string(keyword), "expected '" + std::string(keyword) + "', got '" +
                                                             std::string(tokens[0]) + "'");
    }
    if (tokens.size() != arity) {
        throw ParseError(line, std::string(keyword), "expected " + std::to_string(arity - 1) + " values");
    }
}

}  // namespace

std::string serialize(const Workspace& w) {
    std::ostringstream out;
    int capacity = w.intersections().empty() ? 0 : w.intersections().front().capacity();
    out << "sparcas-workspace 1\n";
    out << "size " << w.width() << ' ' << w.height() << '\n';
    out << "capacity " << capacity << '\n';
    out << "cells " << w.cell_count() << '\n';
    for (const auto& c : w.cells()) {
        out << "cell " << c.id.index << ' ';
        switch (c.kind) {
        case CellKind::Lane:
            out << "lane " << direction_letter(c.direction) << ' ' << c.row << ' ' << c.col;
            break;
        case CellKind::RingSlot:
            out << "ring " << c.intersection << ' ' << c.ring_position << ' ' << c.row << ' ' << c.col;
            break;
        case CellKind::Service:
            out << "service " << c.row << ' ' << c.col;
            break;
        }
        append_successors(out, w.successors(c.id));
    }
    out << "roundabouts " << w.intersections().size() << '\n';
    for (const auto& r : w.intersections()) {
        out << "roundabout " << r.id << " ring";
        for (auto slot : r.ring) {
            out << ' ' << slot.index;
        }
        out << '\n';
        for (const auto& [lane, pos] : r.entries) {
            out << "entry " << r.id << ' ' << lane.index << ' ' << pos << '\n';
        }
        for (const auto& [pos, lane] : r.exits) {
            out << "exit " << r.id << ' ' << pos << ' ' << lane.index << '\n';
        }
    }
    out << "end\n";
    return out.str();
}

Workspace parse_workspace(std::string_view text) {
    LineReader reader(text);

    auto tokens = reader.next();
    if (tokens.empty()) {
        throw ParseError(reader.line(), "header", "empty workspace file");
    }
    expect_keyword(tokens, "sparcas-workspace", 2, reader.line());
    if (tokens[1] != "1") {
        throw ParseError(reader.line(), "version", "unsupported version '" + std::string(tokens[1]) + "'");
    }

    tokens = reader.next();
    expect_keyword(tokens, "size", 3, reader.line());
    int width = parse_int(tokens[1], reader.line(), "width");
    int height = parse_int(tokens[2], reader.line(), "height");

    tokens = reader.next();
    expect_keyword(tokens, "capacity", 2, reader.line());
    int capacity = parse_int(tokens[1], reader.line(), "capacity");

    tokens = reader.next();
    expect_keyword(tokens, "cells", 2, reader.line());
    int count = parse_int(tokens[1], reader.line(), "cells");
    if (count < 0) {
        throw ParseError(reader.line(), "cells", "negative cell count");
    }

    std::vector<Cell> cells;
    std::vector<std::vector<CellId>> successors;
    for (int i = 0; i < count; ++i) {
        tokens = reader.next();
        int line = reader.line();
        if (tokens.empty()) {
            throw ParseError(line, "cell", "unexpected end of input after " + std::to_string(i) + " cells");
        }
        if (tokens[0] != "cell" || tokens.size() < 3) {
            throw ParseError(line, "cell", "expected a cell record");
        }
        Cell c;
        c.id = CellId{parse_int(tokens[1], line, "id")};
        if (c.id.index != i) {
            throw ParseError(line, "id", "cells must be listed in id order; expected " + std::to_string(i));
        }
        size_t arrow;
        if (tokens[2] == "lane") {
            if (tokens.size() < 7 || tokens[3].size() != 1) {
                throw ParseError(line, "lane", "expected: cell <id> lane <dir> <row> <col> -> <succ>");
            }
            c.kind = CellKind::Lane;
            switch (tokens[3][0]) {
            case 'N':
                c.direction = Direction::North;
                break;
            case 'E':
                c.direction = Direction::East;
                break;
            case 'S':
                c.direction = Direction::South;
                break;
            case 'W':
                c.direction = Direction::West;
                break;
            default:
                throw ParseError(line, "direction", "unknown direction '" + std::string(tokens[3]) + "'");
            }
            c.row = parse_int(tokens[4], line, "row");
            c.col = parse_int(tokens[5], line, "col");
            arrow = 6;
        } else if (tokens[2] == "ring") {
            if (tokens.size() < 8) {
                throw ParseError(line, "ring", "expected: cell <id> ring <k> <pos> <row> <col> -> <succ...>");
            }
            c.kind = CellKind::RingSlot;
            c.intersection = parse_int(tokens[3], line, "intersection");
            c.ring_position = parse_int(tokens[4], line, "position");
            c.row = parse_int(tokens[5], line, "row");
            c.col = parse_int(tokens[6], line, "col");
            arrow = 7;
        } else if (tokens[2] == "service") {
            if (tokens.size() < 6) {
                throw ParseError(line, "service", "expected: cell <id> service <row> <col> -> <lane>");
            }
            c.kind = CellKind::Service;
            c.row = parse_int(tokens[3], line, "row");
            c.col = parse_int(tokens[4], line, "col");
            arrow = 5;
        } else {
            throw ParseError(line, "kind", "unknown cell kind '" + std::string(tokens[2]) + "'");
        }
        if (tokens.size() <= arrow || tokens[arrow] != "->") {
            throw ParseError(line, "successors", "missing '->' before the successor list");
        }
        std::vector<CellId> succ;
        for (size_t t = arrow + 1; t < tokens.size(); ++t) {
            int s = parse_int(tokens[t], line, "successors");
            if (s < 0 || s >= count) {
                throw ParseError(line, "successors", "successor " + std::to_string(s) + " out of range");
            }
            succ.push_back(CellId{s});
        }
        cells.push_back(c);
        successors.push_back(std::move(succ));
    }

    tokens = reader.next();
    expect_keyword(tokens, "roundabouts", 2, reader.line());
    int k_count = parse_int(tokens[1], reader.line(), "roundabouts");
    std::vector<Roundabout> rings;
    tokens = reader.next();
    for (int k = 0; k < k_count; ++k) {
        int line = reader.line();
        if (tokens.empty() || tokens[0] != "roundabout" || tokens.size() < 3 || tokens[2] != "ring") {
            throw ParseError(line, "roundabout", "expected: roundabout <k> ring <ids...>");
        }
        Roundabout r;
        r.id = parse_int(tokens[1], line, "id");
        if (r.id != k) {
            throw ParseError(line, "id", "roundabouts must be listed in id order; expected " + std::to_string(k));
        }
        for (size_t t = 3; t < tokens.size(); ++t) {
            int s = parse_int(tokens[t], line, "ring");
            if (s < 0 || s >= count) {
                throw ParseError(line, "ring", "ring cell " + std::to_string(s) + " out of range");
            }
            r.ring.push_back(CellId{s});
        }
        if (r.capacity() != capacity) {
            throw ParseError(line, "ring", "ring has " + std::to_string(r.capacity()) + " slots but capacity is " +
                                                   std::to_string(capacity));
        }
        tokens = reader.next();
        while (!tokens.empty() && (tokens[0] == "entry" || tokens[0] == "exit")) {
            int l = reader.line();
            if (tokens.size() != 4) {
                throw ParseError(l, std::string(tokens[0]), "expected 3 values");
            }
            if (parse_int(tokens[1], l, "roundabout") != k) {
                throw ParseError(l, "roundabout", "record does not follow its roundabout");
            }
            if (tokens[0] == "entry") {
                int lane = parse_int(tokens[2], l, "lane");
                int pos = parse_int(tokens[3], l, "position");
                if (lane < 0 || lane >= count) {
                    throw ParseError(l, "lane", "entry lane out of range");
                }
                r.entries[CellId{lane}] = pos;
            } else {
                int pos = parse_int(tokens[2], l, "position");
                int lane = parse_int(tokens[3], l, "lane");
                if (lane < 0 || lane >= count) {
                    throw ParseError(l, "lane", "exit lane out of range");
                }
                r.exits[pos] = CellId{lane};
            }
            tokens = reader.next();
        }
        rings.push_back(std::move(r));
    }
    if (tokens.empty() || tokens[0] != "end") {
        throw ParseError(reader.line(), "end", "expected 'end'");
    }

    try {
        return Workspace(width, height, std::move(cells), std::move(rings), std::move(successors));
    } catch (const WorkspaceError& e) {
        throw ParseError(reader.line(), "structure", e.what());
    }
}

}  // namespace sparcas
