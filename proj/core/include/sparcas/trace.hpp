#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparcas/simulator.hpp"

namespace sparcas {

// Per-step trace of a run.
//
//   # sparcas-trace v1
//   config width=<W> height=<H> spacing=<B> robots=<n> mix=<e>:<r>:<p> late_percent=<pct>
//          arrival_window=<L> mechanism=<naive|sparcas|baseline> placement=<manager|decentralized>
//          seed=<s> step_limit=<steps> deadlock_window=<steps> mini_slot_ms=<ms>     (one line)
//   step t=<t> robot=<id> pos=<cell> action=<advance|stay> value=<v> payment=<p> credit=<c>
//   authority t=<t> amount=<a>
//   end steps=<steps> records=<n>
//
// One step record per (t, robot on the road at t), in robot id order; pos is
// the cell at t and value is what the robot received for the move (0 when it
// stayed). The authority record appears only for steps where money stayed
// with the authority. Amounts are exact rationals. The config line is absent
// for hand-built scenarios, which therefore cannot be replayed.

struct TraceStep {
    int t = 0;
    RobotId robot = 0;
    CellId pos;
    Move action = Move::Stay;
    Money value;
    Money payment;
    Money credit;

    bool operator==(const TraceStep&) const = default;
};

struct TraceAuthority {
    int t = 0;
    Money amount;
};

struct Trace {
    std::optional<SimConfig> config;
    std::vector<TraceStep> steps;
    std::vector<TraceAuthority> authority;
    int end_steps = 0;
};

std::string format_trace_step(const TraceStep& step);
std::string format_trace_authority(int t, const Money& amount);

/// Throws ParseError with the offending line; a missing end record is a
/// truncated trace.
Trace parse_trace(std::string_view text);

struct Reconciliation {
    bool ok = true;
    int t = -1;
    std::string message;
};

/// Per step: sum of payments == sum of credits + authority amount, exactly.
Reconciliation reconcile(const Trace& trace);

struct ReplayResult {
    enum class Status : std::uint8_t { Match, ParseFailure, ReconciliationFailure, NotReplayable, Divergence };

    Status status = Status::Match;
    // 1-based line of the parse error or first differing line.
    int line = 0;
    std::string expected;
    std::string actual;
    std::string message;

    bool ok() const { return status == Status::Match; }
};

/// Validates the trace, re-executes the run from its config line and compares
/// byte for byte. When `audit` is given the regenerated audit log must match
/// it too.
ReplayResult replay_trace(std::string_view trace_text, std::optional<std::string_view> audit = std::nullopt);

}  // namespace sparcas
