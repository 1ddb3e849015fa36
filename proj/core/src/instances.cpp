#include "sparcas/instances.hpp"

#include <algorithm>
#include <numeric>

namespace sparcas {

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    const std::uint64_t threshold = (0 - span) % span;
    std::uint64_t x = rng();
    while (x < threshold) {
        x = rng();
    }
    return lo + static_cast<int>(x % span);
}

template <typename T>
void shuffle(std::mt19937_64& rng, std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[static_cast<size_t>(pick(rng, 0, static_cast<int>(i) - 1))]);
    }
}

Money random_value(std::mt19937_64& rng) {
    if (pick(rng, 0, 1) == 0) {
        return Money(pick(rng, 0, 10));
    }
    static const Money weights[] = {Money(1, 50), Money(13, 200), Money(1, 5)};
    return Money(pick(rng, 1, 6)) * weights[pick(rng, 0, 2)];
}

}  // namespace

AuctionInstance random_auction_instance(std::mt19937_64& rng, int participants) {
    if (participants < 1 || participants > 11) {
        throw std::invalid_argument("participants must be in 1..11");
    }
    int m = 0;
    int inside = 0;
    while (true) {
        m = pick(rng, 3, 6);
        const int lo = std::max(0, participants - m);
        const int hi = std::min(participants, m - 1);
        if (lo <= hi) {
            inside = pick(rng, lo, hi);
            break;
        }
    }
    AuctionInstance inst;
    inst.ring.id = 0;
    for (int p = 0; p < m; ++p) {
        inst.ring.ring.push_back(CellId{p});
        inst.ring.entries[CellId{100 + p}] = p;
        inst.ring.exits[p] = CellId{200 + p};
    }
    std::vector<int> slots(static_cast<size_t>(m));
    std::iota(slots.begin(), slots.end(), 0);
    shuffle(rng, slots);
    std::vector<int> approaches = slots;
    shuffle(rng, approaches);

    std::vector<RobotId> ids(static_cast<size_t>(participants));
    std::iota(ids.begin(), ids.end(), 0);
    shuffle(rng, ids);
    for (int i = 0; i < participants; ++i) {
        Announcement a;
        a.robot = ids[static_cast<size_t>(i)];
        if (i < inside) {
            const int p = slots[static_cast<size_t>(i)];
            a.current = CellId{p};
            a.next = pick(rng, 0, 1) == 0 ? inst.ring.next_slot(p) : CellId{200 + p};
        } else {
            const int p = approaches[static_cast<size_t>(i - inside)];
            a.current = CellId{100 + p};
            a.next = CellId{p};
        }
        a.reported_value = random_value(rng);
        inst.announcements.push_back(std::move(a));
    }
    for (int p = 0; p < m; ++p) {
        if (pick(rng, 0, 3) == 0) {
            inst.blocked.push_back(CellId{200 + p});
        }
    }
    return inst;
}

Scenario four_robot_fixture(MechanismKind mechanism) {
    Scenario s;
    s.workspace = shared_grid({8, 8, 6});
    s.options.mechanism = mechanism;
    const auto& w = *s.workspace;
    const auto& ring = w.intersection(0);
    // Ring order: top-right, top-left, bottom-left, bottom-right.
    const CellId tl = ring.ring[1];
    const CellId br = ring.ring[3];
    CellId east_entry;
    CellId west_entry;
    for (const auto& [lane, pos] : ring.entries) {
        if (pos == 0) {
            east_entry = lane;
        } else if (pos == 2) {
            west_entry = lane;
        }
    }
    struct Leg {
        CellId start;
        CellId goal;
        RobotClass cls;
    };
    const Leg legs[] = {
            {tl, ring.exits.at(2), RobotClass::Economy},
            {br, ring.exits.at(0), RobotClass::Economy},
            {east_entry, ring.exits.at(1), RobotClass::Premium},
            {west_entry, ring.exits.at(3), RobotClass::Premium},
    };
    RobotId id = 0;
    for (const auto& leg : legs) {
        RobotSpec r;
        r.id = id++;
        r.cls = leg.cls;
        r.weight = class_weight(leg.cls);
        r.path = shortest_path(w, leg.start, leg.goal);
        s.robots.push_back(std::move(r));
    }
    return s;
}

TinyInstance random_tiny_instance(std::mt19937_64& rng) {
    TinyInstance inst;
    const int size = pick(rng, 0, 1) == 0 ? 8 : 16;
    inst.params = {size, size, 6};
    const auto& w = *shared_grid(inst.params);
    std::vector<CellId> lanes;
    for (const auto& c : w.cells()) {
        if (c.kind == CellKind::Lane) {
            lanes.push_back(c.id);
        }
    }
    const int robots = pick(rng, 2, 3);
    shuffle(rng, lanes);
    std::vector<CellId> goals = lanes;
    shuffle(rng, goals);
    auto next_goal = goals.begin();
    for (int i = 0; i < robots; ++i) {
        const CellId start = lanes[static_cast<size_t>(i)];
        while (*next_goal == start) {
            ++next_goal;
        }
        inst.robots.push_back({start, *next_goal++});
    }
    return inst;
}

Scenario tiny_scenario(const TinyInstance& instance, MechanismKind mechanism) {
    Scenario s;
    s.workspace = shared_grid(instance.params);
    s.options.mechanism = mechanism;
    RobotId id = 0;
    for (const auto& r : instance.robots) {
        RobotSpec spec;
        spec.id = id++;
        spec.cls = RobotClass::Regular;
        spec.weight = class_weight(spec.cls);
        spec.path = shortest_path(*s.workspace, r.start, r.goal);
        s.robots.push_back(std::move(spec));
    }
    return s;
}

}  // namespace sparcas
