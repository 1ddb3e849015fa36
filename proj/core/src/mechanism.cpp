#include "sparcas/mechanism.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

namespace sparcas {

Move Configuration::at(RobotId robot) const {
    auto it = moves.find(robot);
    if (it == moves.end()) {
        throw std::out_of_range("robot " + std::to_string(robot) + " is not part of the configuration");
    }
    return it->second;
}

Money valuation(const Configuration& configuration, const Announcement& announcement) {
    return configuration.advances(announcement.robot) ? announcement.reported_value : Money(0);
}

Money welfare(const Configuration& configuration, std::span<const Announcement> announcements) {
    Money total = 0;
    for (const auto& a : announcements) {
        total += valuation(configuration, a);
    }
    return total;
}

namespace {

// Participants sorted by id, with the ring geometry each one needs.
struct Participant {
    const Announcement* announcement;
    CellId current;
    CellId target;
    bool current_in_ring;
    bool target_in_ring;
    bool target_blocked;
};

class Instance {
public:
    Instance(const Roundabout& ring, std::span<const Announcement> announcements, std::span<const CellId> blocked)
            : _capacity(ring.capacity()) {
        std::set<CellId> blocked_set(blocked.begin(), blocked.end());
        std::set<RobotId> ids;
        std::set<CellId> occupied;
        for (const auto& a : announcements) {
            if (!ids.insert(a.robot).second) {
                throw InvalidAuction("robot " + std::to_string(a.robot) + " announced twice");
            }
            if (!occupied.insert(a.current).second) {
                throw InvalidAuction("two participants announce the same current cell " +
                                     std::to_string(a.current.index));
            }
            if (a.reported_value < 0) {
                throw InvalidAuction("robot " + std::to_string(a.robot) + " reported a negative value");
            }
            auto from = ring.position_of(a.current);
            auto to = ring.position_of(a.next);
            bool legal = false;
            if (from) {
                auto exit = ring.exits.find(*from);
                legal = a.next == a.current || a.next == ring.next_slot(*from) ||
                        (exit != ring.exits.end() && exit->second == a.next);
            } else if (to) {
                auto entry = ring.entries.find(a.current);
                legal = entry != ring.entries.end() && entry->second == *to;
            } else {
                throw InvalidAuction("robot " + std::to_string(a.robot) + " is neither inside nor entering roundabout " +
                                     std::to_string(ring.id));
            }
            if (!legal) {
                throw InvalidAuction("robot " + std::to_string(a.robot) + " announces a move against the traffic rules of roundabout " +
                                     std::to_string(ring.id));
            }
            _participants.push_back({&a, a.current, a.next, from.has_value(), to.has_value(),
                    blocked_set.contains(a.next) && a.next != a.current});
        }
        const auto inside = std::count_if(_participants.begin(), _participants.end(),
                [](const Participant& p) { return p.current_in_ring; });
        if (inside > _capacity - 1) {
            throw InvalidAuction("roundabout " + std::to_string(ring.id) + " already holds " + std::to_string(inside) +
                                 " robots, more than its capacity minus one");
        }
        for (auto cell : blocked_set) {
            if (occupied.contains(cell)) {
                throw InvalidAuction("blocked cell " + std::to_string(cell.index) + " is held by a participant");
            }
        }
        std::sort(_participants.begin(), _participants.end(),
                [](const Participant& x, const Participant& y) { return x.announcement->robot < y.announcement->robot; });
    }

    size_t size() const { return _participants.size(); }
    const Participant& operator[](size_t i) const { return _participants[i]; }

    // Feasible assignments as bit vectors (bit i = participant i advances),
    // in lexicographic order.
    std::vector<std::vector<bool>> enumerate() const {
        std::vector<std::vector<bool>> out;
        std::vector<bool> assignment(size(), false);
        extend(0, 0, assignment, out);
        return out;
    }

    Configuration to_configuration(const std::vector<bool>& assignment) const {
        Configuration c;
        for (size_t i = 0; i < size(); ++i) {
            c.moves.emplace(_participants[i].announcement->robot, assignment[i] ? Move::Advance : Move::Stay);
        }
        return c;
    }

private:
    CellId end_cell(size_t i, bool advance) const { return advance ? _participants[i].target : _participants[i].current; }
    bool ends_in_ring(size_t i, bool advance) const {
        return advance ? _participants[i].target_in_ring : _participants[i].current_in_ring;
    }

    bool compatible(size_t d, const std::vector<bool>& assignment) const {
        const bool move_d = assignment[d];
        if (move_d && _participants[d].target_blocked) {
            return false;
        }
        const CellId end_d = end_cell(d, move_d);
        for (size_t e = 0; e < d; ++e) {
            const bool move_e = assignment[e];
            if (end_cell(e, move_e) == end_d) {
                return false;
            }
            if (move_d && !move_e && _participants[d].target == _participants[e].current) {
                return false;
            }
            if (move_e && !move_d && _participants[e].target == _participants[d].current) {
                return false;
            }
            if (move_d && move_e && _participants[d].target == _participants[e].current &&
                    _participants[e].target == _participants[d].current) {
                return false;
            }
        }
        return true;
    }

    void extend(size_t depth, int ring_load, std::vector<bool>& assignment, std::vector<std::vector<bool>>& out) const {
        if (depth == size()) {
            out.push_back(assignment);
            return;
        }
        for (bool advance : {false, true}) {
            assignment[depth] = advance;
            int load = ring_load + (ends_in_ring(depth, advance) ? 1 : 0);
            if (load <= _capacity - 1 && compatible(depth, assignment)) {
                extend(depth + 1, load, assignment, out);
            }
        }
        assignment[depth] = false;
    }

    int _capacity;
    std::vector<Participant> _participants;
};

struct Evaluated {
    std::vector<std::vector<bool>> feasible;
    // Total reported welfare of each feasible assignment.
    std::vector<Money> totals;
};

Evaluated evaluate(const Instance& instance) {
    Evaluated ev;
    ev.feasible = instance.enumerate();
    ev.totals.reserve(ev.feasible.size());
    for (const auto& assignment : ev.feasible) {
        Money total = 0;
        for (size_t i = 0; i < instance.size(); ++i) {
            if (assignment[i]) {
                total += instance[i].announcement->reported_value;
            }
        }
        ev.totals.push_back(std::move(total));
    }
    return ev;
}

// Index of the first assignment maximizing totals minus the excluded
// participant's own contribution (excluded = -1 for none).
size_t argmax(const Instance& instance, const Evaluated& ev, int excluded, bool unseeded) {
    std::vector<size_t> best{0};
    Money best_value;
    for (size_t j = 0; j < ev.feasible.size(); ++j) {
        Money value = ev.totals[j];
        if (excluded >= 0 && ev.feasible[j][static_cast<size_t>(excluded)]) {
            value -= instance[static_cast<size_t>(excluded)].announcement->reported_value;
        }
        if (j == 0 || value > best_value) {
            best_value = std::move(value);
            best.assign(1, j);
        } else if (value == best_value) {
            best.push_back(j);
        }
    }
    if (unseeded && best.size() > 1) {
        std::random_device device;
        return best[device() % best.size()];
    }
    return best.front();
}

Money others_welfare(const Instance& instance, const std::vector<bool>& assignment, size_t excluded) {
    Money total = 0;
    for (size_t i = 0; i < instance.size(); ++i) {
        if (i != excluded && assignment[i]) {
            total += instance[i].announcement->reported_value;
        }
    }
    return total;
}

int index_of(const Instance& instance, RobotId robot) {
    for (size_t i = 0; i < instance.size(); ++i) {
        if (instance[i].announcement->robot == robot) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

}  // namespace

std::vector<Configuration> feasible_configurations(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked) {
    Instance instance(ring, announcements, blocked);
    std::vector<Configuration> out;
    for (const auto& assignment : instance.enumerate()) {
        out.push_back(instance.to_configuration(assignment));
    }
    return out;
}

Configuration efficient_configuration(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked) {
    if (announcements.empty()) {
        throw InvalidAuction("an auction needs at least one announcement");
    }
    Instance instance(ring, announcements, blocked);
    auto ev = evaluate(instance);
    return instance.to_configuration(ev.feasible[argmax(instance, ev, -1, false)]);
}

Configuration exclusion_configuration(const Roundabout& ring, std::span<const Announcement> announcements,
        RobotId excluded, std::span<const CellId> blocked) {
    Instance instance(ring, announcements, blocked);
    int index = index_of(instance, excluded);
    if (index < 0) {
        throw InvalidAuction("excluded robot " + std::to_string(excluded) + " did not announce");
    }
    auto ev = evaluate(instance);
    return instance.to_configuration(ev.feasible[argmax(instance, ev, index, false)]);
}

AuctionOutcome sparcas_auction(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked, const AuctionHooks& hooks) {
    if (announcements.empty()) {
        throw InvalidAuction("an auction needs at least one announcement");
    }
    Instance instance(ring, announcements, blocked);
    auto ev = evaluate(instance);
    size_t chosen = argmax(instance, ev, -1, hooks.unseeded_tie_break);

    AuctionOutcome outcome;
    outcome.chosen = instance.to_configuration(ev.feasible[chosen]);
    outcome.welfare = ev.totals[chosen];
    for (size_t i = 0; i < instance.size(); ++i) {
        size_t without = argmax(instance, ev, static_cast<int>(i), false);
        Money payment = others_welfare(instance, ev.feasible[without], i) - others_welfare(instance, ev.feasible[chosen], i);
        if (hooks.flip_payment_sign) {
            payment = -payment;
        }
        outcome.payments.emplace(instance[i].announcement->robot, std::move(payment));
    }
    return outcome;
}

AuctionOutcome decentralized_auction(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked) {
    AuctionOutcome combined;
    for (size_t self = 0; self < announcements.size(); ++self) {
        // This robot's inbox: its own announcement first, then the others in
        // the order they were heard.
        std::vector<Announcement> inbox;
        inbox.push_back(announcements[self]);
        for (size_t j = 0; j < announcements.size(); ++j) {
            if (j != self) {
                inbox.push_back(announcements[j]);
            }
        }
        auto local = sparcas_auction(ring, inbox, blocked);
        RobotId id = announcements[self].robot;
        combined.chosen.moves.emplace(id, local.chosen.at(id));
        combined.payments.emplace(id, local.payments.at(id));
        if (self == 0) {
            combined.welfare = local.welfare;
        }
    }
    return combined;
}

NaiveResult naive_step(const Announcement& self, std::span<const Announcement> others) {
    for (const auto& other : others) {
        if (other.robot != self.robot && other.current == self.next) {
            return {Decision::Stop, 0};
        }
    }
    Money highest_losing = 0;
    for (const auto& other : others) {
        if (other.robot == self.robot || other.next != self.next) {
            continue;
        }
        const bool other_wins = other.reported_value > self.reported_value ||
                                (other.reported_value == self.reported_value && other.robot > self.robot);
        if (other_wins) {
            return {Decision::Stop, 0};
        }
        highest_losing = std::max(highest_losing, other.reported_value);
    }
    return {Decision::Go, highest_losing};
}

std::vector<Transfer> redistribute(const std::map<int, Money>& collected,
        const std::map<int, std::vector<RobotId>>& participants, std::span<const RobotId> present) {
    std::vector<RobotId> everyone(present.begin(), present.end());
    std::sort(everyone.begin(), everyone.end());
    everyone.erase(std::unique(everyone.begin(), everyone.end()), everyone.end());

    std::vector<Transfer> transfers;
    for (const auto& [k, total] : collected) {
        if (total < 0) {
            throw std::invalid_argument("intersection " + std::to_string(k) + " collected a negative total");
        }
        if (total == 0) {
            continue;
        }
        std::vector<RobotId> recipients;
        auto it = participants.find(k);
        for (auto id : everyone) {
            if (it == participants.end() || std::find(it->second.begin(), it->second.end(), id) == it->second.end()) {
                recipients.push_back(id);
            }
        }
        if (recipients.empty()) {
            transfers.push_back({k, Party::authority(), Party::authority(), total});
            continue;
        }
        Money share = total / static_cast<long>(recipients.size());
        for (auto id : recipients) {
            transfers.push_back({k, Party::authority(), Party::of(id), share});
        }
    }
    return transfers;
}

}  // namespace sparcas
