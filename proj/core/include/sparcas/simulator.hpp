#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparcas/audit.hpp"
#include "sparcas/mechanism.hpp"
#include "sparcas/planner.hpp"
#include "sparcas/workspace.hpp"

namespace sparcas {

enum class RobotClass : std::uint8_t { Economy, Regular, Premium };

const char* to_string(RobotClass cls);
// 1/50, 13/200 and 1/5.
Money class_weight(RobotClass cls);

enum class MechanismKind : std::uint8_t { Naive, Sparcas, PrioritizedBaseline };
const char* to_string(MechanismKind kind);
MechanismKind parse_mechanism(std::string_view name);

/// Where the spot auction is evaluated. Outcomes are identical; the
/// decentralized placement repeats the computation once per participant.
enum class AuctionPlacement : std::uint8_t { IntersectionManager, Decentralized };

struct WorkspaceParams {
    int width = 100;
    int height = 100;
    int block_spacing = 8;

    bool operator==(const WorkspaceParams&) const = default;
};

/// Everything needed to reproduce a run. The seed determines the trace.
struct SimConfig {
    WorkspaceParams workspace;
    int robots = 0;
    // Relative weights of economy, regular and premium robots.
    std::array<int, 3> class_mix{1, 1, 1};
    // Percentage of robots that arrive uniformly at random in
    // [0, arrival_window]; the rest arrive at t = 0. A window of 0 means the
    // workspace width.
    int late_percent = 0;
    int arrival_window = 0;
    MechanismKind mechanism = MechanismKind::Sparcas;
    AuctionPlacement placement = AuctionPlacement::IntersectionManager;
    std::uint64_t seed = 0;
    int step_limit = 20000;
    int deadlock_window = 10;
    // Reporting constant for the online auction time; not simulated.
    int mini_slot_ms = 60;

    bool operator==(const SimConfig&) const = default;
};

std::string format_config(const SimConfig& config);
// Inverse of format_config; throws ParseError.
SimConfig parse_config(std::string_view line, int line_no = 1);

struct RobotSpec {
    RobotId id = 0;
    RobotClass cls = RobotClass::Regular;
    Money weight;
    // Service cells the robot travels between; invalid for hand-built fixtures.
    CellId source;
    CellId goal;
    // Road cells from the source access lane to the goal access lane.
    Path path;
    int arrival_time = 0;
    double planning_seconds = 0;
};

struct SimOptions {
    MechanismKind mechanism = MechanismKind::Sparcas;
    AuctionPlacement placement = AuctionPlacement::IntersectionManager;
    int step_limit = 20000;
    int deadlock_window = 10;
    int mini_slot_ms = 60;
    AuctionHooks hooks;
};

struct Scenario {
    std::shared_ptr<const Workspace> workspace;
    std::vector<RobotSpec> robots;
    SimOptions options;
    // Present when the scenario was generated from a config (replayable).
    std::optional<SimConfig> config;
};

/// Shared, immutable grid for the given parameters.
std::shared_ptr<const Workspace> shared_grid(const WorkspaceParams& params);

/// Draws robots (class, source, goal, arrival) from the seed and computes
/// each robot's offline shortest path.
Scenario make_scenario(const SimConfig& config);

enum class Stage : std::uint8_t { Pending, Active, Done };

struct RobotState {
    RobotSpec spec;
    Stage stage = Stage::Pending;
    size_t path_index = 0;
    int injected_at = -1;
    int finished_at = -1;
    int advances = 0;
    Money value_received;
    Money paid;
    Money credited;
    int auctions = 0;

    CellId position() const { return spec.path.cells[path_index]; }
    bool at_goal() const { return path_index + 1 == spec.path.cells.size(); }
    // (elapsed steps since injection) - advances.
    int wait_time(int now) const { return (now - injected_at) - advances; }
};

using Occupancy = std::map<RobotId, CellId>;

struct CollisionReport {
    std::vector<RobotId> offenders;
    std::vector<std::string> details;

    bool collided() const { return !offenders.empty(); }
};

/// Flags two robots on one cell, a move into a cell whose occupant stayed,
/// and pairwise swaps between two consecutive occupancies.
CollisionReport detect_collision(const Occupancy& before, const Occupancy& after);

struct StepActivity {
    int advances = 0;
    int on_road = 0;
};

/// True iff the last `window` steps had robots on the road and none of them
/// advanced.
bool detect_deadlock(std::span<const StepActivity> history, int window);

struct StepLedger {
    int t = 0;
    Money paid;
    Money credited;
    Money authority;
};

struct RobotReport {
    RobotId id = 0;
    RobotClass cls = RobotClass::Regular;
    int arrival_time = 0;
    int injected_at = -1;
    int finished_at = -1;
    int path_length = 0;
    int execution_time = 0;
    int wait_time = 0;
    int auctions = 0;
    Money value;
    Money paid;
    Money credited;

    bool finished() const { return finished_at >= 0; }
};

struct ClassSummary {
    int robots = 0;
    double mean_wait = 0;
    double mean_payment = 0;
    double mean_value = 0;
};

struct SimReport {
    MechanismKind mechanism = MechanismKind::Sparcas;
    int robots = 0;
    int finished = 0;
    int makespan = 0;
    int steps = 0;
    std::vector<RobotReport> per_robot;
    std::map<RobotClass, ClassSummary> per_class;
    double mean_execution_time = 0;
    double fraction_never_paid = 1;
    int collisions = 0;
    bool deadlock = false;
    bool step_limit_reached = false;
    bool timed_out = false;
    int max_ring_occupancy = 0;
    int auctions = 0;
    int negative_payments = 0;
    int negative_payoffs = 0;
    Money total_paid;
    Money total_credited;
    Money authority_holdings;
    // Steps with any money movement.
    std::vector<StepLedger> ledger;
    // Offline path computation: max over robots (parallel planning).
    double offline_seconds = 0;
    // makespan x mini-slot.
    double auction_seconds = 0;
    // Prioritized baseline: total centralized planning time.
    double baseline_planning_seconds = 0;
    int baseline_failures = 0;
    std::vector<std::string> anomalies;

    double planning_seconds() const;
};

struct RunOptions {
    bool capture_trace = true;
    bool capture_audit = true;
    // Keep per-step occupancies (motion history) in the result.
    bool capture_motion = false;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct RunResult {
    SimReport report;
    std::string trace;
    std::string audit;
    // motion[t] = occupancy at the start of step t.
    std::vector<Occupancy> motion;
};

/// A move produced a collision; carries the trace so far.
class CollisionError : public std::runtime_error {
public:
    CollisionError(const std::string& message, std::string trace)
            : std::runtime_error(message)
            , _trace(std::move(trace)) {}

    const std::string& trace() const { return _trace; }

private:
    std::string _trace;
    int _trace_records = 0;
};

/// Synchronous discrete-time engine. Each step: lane robots move iff their
/// next cell is free, intersection participants follow the mechanism, all
/// moves apply at once, collected money is redistributed, pending robots are
/// injected and robots at their goal leave.
class Simulation {
public:
    Simulation(Scenario scenario, RunOptions options = {});

    void step();
    bool finished() const;
    int now() const { return _now; }
    const std::vector<RobotState>& robots() const { return _robots; }
    const Workspace& workspace() const { return *_scenario.workspace; }
    Occupancy occupancy() const;
    const std::vector<StepActivity>& activity() const { return _activity; }

    RunResult finish();

private:
    void inject_and_retire(int t);
    void step_baseline();
    void record_ring_occupancy();
    void append_trace_step(int t, const std::vector<size_t>& active, const std::vector<Move>& moves,
            const std::vector<Money>& values, const std::vector<Money>& payments, const std::vector<Money>& credits,
            const Money& authority);

    Scenario _scenario;
    RunOptions _options;
    std::vector<RobotState> _robots;
    std::vector<std::optional<TimedPath>> _plans;
    int _now = 0;
    bool _deadlock = false;
    bool _step_limit = false;
    bool _timed_out = false;
    int _max_ring = 0;
    int _auctions = 0;
    int _negative_payments = 0;
    int _negative_payoffs = 0;
    double _baseline_seconds = 0;
    Money _authority;
    std::vector<StepActivity> _activity;
    std::vector<StepLedger> _ledger;
    std::vector<std::string> _anomalies;
    std::vector<AuditEntry> _audit;
    std::string _trace;
    int _trace_records = 0;
    std::vector<Occupancy> _motion;
};

RunResult simulate(const Scenario& scenario, const RunOptions& options = {});
RunResult run(const SimConfig& config, const RunOptions& options = {});

struct Perturbation {
    enum class Kind : std::uint8_t { Add, Remove };
    Kind kind = Kind::Remove;
    // Robot to add (Add) or id to drop (Remove).
    RobotSpec robot;
};

struct EntryExitReport {
    bool paths_unchanged = true;
    bool collision_free = true;
    bool budget_balanced = true;
    bool deadlock = false;
    bool completed = true;
    // Survivors whose step-by-step positions differ from the base run.
    std::vector<RobotId> motion_changed;
    // Per surviving robot: perturbed finish time - base finish time.
    std::map<RobotId, int> makespan_delta;

    bool ok() const { return paths_unchanged && collision_free && budget_balanced && !deadlock && completed; }
};

/// Runs the scenario with and without one robot and checks that the other
/// robots keep their offline paths and every per-step guarantee still holds.
EntryExitReport entry_exit_check(const Scenario& base, const Perturbation& perturbation);

}  // namespace sparcas
