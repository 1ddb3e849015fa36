#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sparcas/money.hpp"
#include "sparcas/planner.hpp"
#include "sparcas/workspace.hpp"

namespace sparcas {

enum class Move : std::uint8_t { Stay, Advance };

/// What a robot broadcasts near an intersection: where it is, where it wants
/// to go next, and the value it claims for going there now.
struct Announcement {
    RobotId robot = 0;
    CellId current;
    CellId next;
    Money reported_value;

    bool operator==(const Announcement&) const = default;
};

/// Stay/advance decision for every participant of one intersection.
struct Configuration {
    std::map<RobotId, Move> moves;

    // Throws std::out_of_range when the robot is not a participant.
    Move at(RobotId robot) const;
    bool advances(RobotId robot) const { return at(robot) == Move::Advance; }
    bool operator==(const Configuration&) const = default;
};

struct AuctionOutcome {
    Configuration chosen;
    std::map<RobotId, Money> payments;
    Money welfare;

    bool operator==(const AuctionOutcome&) const = default;
};

/// A robot or the trusted authority.
struct Party {
    std::optional<RobotId> robot;

    static Party authority() { return {}; }
    static Party of(RobotId id) { return Party{id}; }
    bool is_authority() const { return !robot.has_value(); }
    bool operator==(const Party&) const = default;
};

struct Transfer {
    int intersection = -1;
    Party payer;
    Party payee;
    Money amount;

    bool operator==(const Transfer&) const = default;
};

class InvalidAuction : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Test hooks for mutation checks; production code leaves both off.
struct AuctionHooks {
    // Pick uniformly among welfare-maximizing configurations using a
    // nondeterministic seed instead of the lexicographic rule.
    bool unseeded_tie_break = false;
    bool flip_payment_sign = false;
};

// Reported value if the robot advances under `configuration`, otherwise 0.
Money valuation(const Configuration& configuration, const Announcement& announcement);
Money welfare(const Configuration& configuration, std::span<const Announcement> announcements);

/// All stay/advance assignments of the participants that keep occupancy
/// exclusive, never move into a cell whose occupant stays, never swap, leave
/// at most m - 1 robots in the ring and never enter a `blocked` cell (a cell
/// held by a robot outside the auction). Ordered lexicographically by
/// (robot id, Stay < Advance); the all-Stay configuration comes first.
/// Throws InvalidAuction when an announcement does not belong to `ring`.
std::vector<Configuration> feasible_configurations(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked = {});

/// Welfare-maximizing feasible configuration; ties go to the
/// lexicographically smallest. Requires at least one announcement.
Configuration efficient_configuration(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked = {});

/// Configuration maximizing the welfare of everyone except `excluded`, over
/// the same feasible set: the excluded robot is still physically present and
/// may move or stay, only its value is dropped.
Configuration exclusion_configuration(const Roundabout& ring, std::span<const Announcement> announcements,
        RobotId excluded, std::span<const CellId> blocked = {});

/// One spot auction at one intersection: efficient allocation and
/// externality payments.
AuctionOutcome sparcas_auction(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked = {}, const AuctionHooks& hooks = {});

/// Same outcome assembled the fully decentralized way: every participant
/// evaluates the auction from its own copy of the announcements (its own
/// first) and keeps only its own move and payment.
AuctionOutcome decentralized_auction(const Roundabout& ring, std::span<const Announcement> announcements,
        std::span<const CellId> blocked = {});

enum class Decision : std::uint8_t { Stop, Go };

struct NaiveResult {
    Decision decision = Decision::Stop;
    Money payment;
};

/// Naive per-robot rule: stop if the next cell is occupied now; otherwise
/// the highest value (ties to the larger id) among robots targeting the same
/// cell goes and pays the highest losing bid.
NaiveResult naive_step(const Announcement& self, std::span<const Announcement> others);

/// Splits each intersection's collected total equally among the robots
/// present at t that did not take part in that intersection's auction. With
/// no such robot the total stays with the authority. Payer is always the
/// authority.
std::vector<Transfer> redistribute(const std::map<int, Money>& collected,
        const std::map<int, std::vector<RobotId>>& participants, std::span<const RobotId> present);

}  // namespace sparcas
