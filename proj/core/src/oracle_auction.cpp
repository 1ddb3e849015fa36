#include <algorithm>
#include <set>

#include "sparcas/oracle.hpp"

namespace sparcas::oracle {

namespace {

struct Bidder {
    RobotId id;
    CellId from;
    CellId to;
    Money bid;
};

std::vector<Bidder> bidders_of(const Roundabout& ring, std::span<const Announcement> anns) {
    std::vector<Bidder> out;
    for (const auto& a : anns) {
        out.push_back({a.robot, a.current, a.next, a.reported_value});
    }
    std::sort(out.begin(), out.end(), [](const Bidder& x, const Bidder& y) { return x.id < y.id; });
    for (size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i].id == out[i + 1].id) {
            throw std::invalid_argument("oracle: robot " + std::to_string(out[i].id) + " announced twice");
        }
    }
    for (const auto& b : out) {
        if (b.bid < 0) {
            throw std::invalid_argument("oracle: negative bid");
        }
        auto slot = std::find(ring.ring.begin(), ring.ring.end(), b.from);
        if (slot != ring.ring.end()) {
            const auto pos = static_cast<size_t>(slot - ring.ring.begin());
            const CellId forward = ring.ring[(pos + 1) % ring.ring.size()];
            auto exit = ring.exits.find(static_cast<int>(pos));
            const bool leaves = exit != ring.exits.end() && exit->second == b.to;
            if (b.to != forward && !leaves) {
                throw std::invalid_argument("oracle: robot " + std::to_string(b.id) + " has an illegal ring move");
            }
            continue;
        }
        auto entry = ring.entries.find(b.from);
        if (entry == ring.entries.end() || ring.ring[static_cast<size_t>(entry->second)] != b.to) {
            throw std::invalid_argument("oracle: robot " + std::to_string(b.id) + " is neither in nor entering the ring");
        }
    }
    return out;
}

// Bit (n - 1 - j) set means bidder j advances, so ascending masks are in
// lexicographic order of (robot id, Stay < Advance).
bool moves(unsigned mask, size_t j, size_t n) {
    return ((mask >> (n - 1 - j)) & 1U) != 0;
}

bool admissible(unsigned mask, const std::vector<Bidder>& b, const Roundabout& ring,
        const std::set<CellId>& blocked) {
    const size_t n = b.size();
    std::vector<CellId> final_cell(n);
    for (size_t j = 0; j < n; ++j) {
        final_cell[j] = moves(mask, j, n) ? b[j].to : b[j].from;
    }
    for (size_t j = 0; j < n; ++j) {
        if (moves(mask, j, n) && blocked.contains(b[j].to)) {
            return false;
        }
        for (size_t l = j + 1; l < n; ++l) {
            if (final_cell[j] == final_cell[l]) {
                return false;
            }
            const bool swap = moves(mask, j, n) && moves(mask, l, n) && b[j].to == b[l].from && b[l].to == b[j].from;
            if (swap) {
                return false;
            }
        }
    }
    int inside = 0;
    for (auto c : final_cell) {
        if (std::find(ring.ring.begin(), ring.ring.end(), c) != ring.ring.end()) {
            ++inside;
        }
    }
    return inside <= static_cast<int>(ring.ring.size()) - 1;
}

Money sum_bids(unsigned mask, const std::vector<Bidder>& b, std::optional<size_t> skip) {
    Money total = 0;
    for (size_t j = 0; j < b.size(); ++j) {
        if (moves(mask, j, b.size()) && skip != j) {
            total += b[j].bid;
        }
    }
    return total;
}

std::vector<unsigned> admissible_masks(const Roundabout& ring, const std::vector<Bidder>& b,
        std::span<const CellId> blocked) {
    if (b.size() > max_auction_participants) {
        throw OracleRefused("oracle_auction refuses more than 12 participants");
    }
    std::set<CellId> blocked_set(blocked.begin(), blocked.end());
    std::vector<unsigned> out;
    for (unsigned mask = 0; mask < (1U << b.size()); ++mask) {
        if (admissible(mask, b, ring, blocked_set)) {
            out.push_back(mask);
        }
    }
    return out;
}

}  // namespace

AuctionOutcome oracle_auction(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked) {
    const auto b = bidders_of(ring, announcements);
    if (b.empty()) {
        throw std::invalid_argument("oracle: empty auction");
    }
    const auto masks = admissible_masks(ring, b, blocked);
    if (masks.empty()) {
        throw std::invalid_argument("oracle: not even the all-stay assignment is admissible");
    }

    unsigned best = masks.front();
    Money best_welfare = sum_bids(best, b, std::nullopt);
    for (unsigned mask : masks) {
        Money w = sum_bids(mask, b, std::nullopt);
        if (w > best_welfare) {
            best = mask;
            best_welfare = w;
        }
    }

    AuctionOutcome out;
    out.welfare = best_welfare;
    for (size_t j = 0; j < b.size(); ++j) {
        out.chosen.moves[b[j].id] = moves(best, j, b.size()) ? Move::Advance : Move::Stay;
        Money without = 0;
        for (unsigned mask : masks) {
            without = std::max(without, sum_bids(mask, b, j));
        }
        out.payments[b[j].id] = without - sum_bids(best, b, j);
    }
    return out;
}

size_t oracle_feasible_count(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked) {
    return admissible_masks(ring, bidders_of(ring, announcements), blocked).size();
}

std::vector<Money> misreport_grid(const Roundabout& ring, std::span<const Announcement> truthful, RobotId robot,
        std::span<const CellId> blocked) {
    const Money eps(1, 1000);
    std::vector<Money> grid;
    for (int v = 0; v <= 10; ++v) {
        grid.emplace_back(v);
    }
    for (const auto& a : truthful) {
        grid.push_back(a.reported_value);
        if (a.robot != robot) {
            grid.push_back(a.reported_value + eps);
            grid.push_back(a.reported_value - eps);
        }
    }
    // Threshold bid: others' best welfare minus their best welfare among
    // assignments where `robot` advances.
    const auto b = bidders_of(ring, truthful);
    auto me = std::find_if(b.begin(), b.end(), [&](const Bidder& x) { return x.id == robot; });
    if (me != b.end()) {
        const size_t j = static_cast<size_t>(me - b.begin());
        const auto masks = admissible_masks(ring, b, blocked);
        Money overall = 0;
        std::optional<Money> advancing;
        for (unsigned mask : masks) {
            Money others = sum_bids(mask, b, j);
            overall = std::max(overall, others);
            if (moves(mask, j, b.size()) && (!advancing || others > *advancing)) {
                advancing = others;
            }
        }
        if (advancing) {
            const Money threshold = overall - *advancing;
            grid.push_back(threshold);
            grid.push_back(threshold + eps);
            grid.push_back(threshold - eps);
        }
    }
    std::erase_if(grid, [](const Money& m) { return m < 0; });
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

TruthfulnessVerdict misreport_sweep(const Roundabout& ring, std::span<const Announcement> truthful,
        std::span<const CellId> blocked, const AuctionFn& auction, std::span<const Money> extra) {
    if (truthful.size() > 5) {
        throw OracleRefused("misreport_sweep refuses more than 5 participants");
    }
    AuctionFn run = auction ? auction
                            : AuctionFn([](const Roundabout& r, std::span<const Announcement> a,
                                                std::span<const CellId> bl) { return sparcas_auction(r, a, bl); });
    auto payoff = [](const AuctionOutcome& o, RobotId id, const Money& true_value) -> Money {
        const Money gained = o.chosen.at(id) == Move::Advance ? true_value : Money(0);
        return gained - o.payments.at(id);
    };

    TruthfulnessVerdict verdict;
    const AuctionOutcome honest = run(ring, truthful, blocked);
    for (size_t i = 0; i < truthful.size(); ++i) {
        const auto& me = truthful[i];
        const Money honest_payoff = payoff(honest, me.robot, me.reported_value);
        auto grid = misreport_grid(ring, truthful, me.robot, blocked);
        grid.insert(grid.end(), extra.begin(), extra.end());
        std::vector<Announcement> lied(truthful.begin(), truthful.end());
        for (const auto& report : grid) {
            if (report < 0) {
                continue;
            }
            lied[i].reported_value = report;
            const Money p = payoff(run(ring, lied, blocked), me.robot, me.reported_value);
            ++verdict.misreports_checked;
            if (p > honest_payoff) {
                verdict.deviations.push_back({me.robot, me.reported_value, report, honest_payoff, p});
            }
        }
    }
    return verdict;
}

}  // namespace sparcas::oracle
