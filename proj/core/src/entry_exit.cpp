#include <algorithm>
#include <set>

#include "sparcas/simulator.hpp"

namespace sparcas {

namespace {

struct Observed {
    std::vector<RobotState> robots;
    std::vector<Occupancy> motion;
    SimReport report;
    bool collided = false;
};

Observed observe(const Scenario& scenario) {
    RunOptions options;
    options.capture_trace = false;
    options.capture_audit = false;
    options.capture_motion = true;
    Observed out;
    Simulation sim(scenario, options);
    try {
        while (!sim.finished()) {
            sim.step();
        }
    } catch (const CollisionError&) {
        out.collided = true;
    }
    out.robots = sim.robots();
    auto result = sim.finish();
    out.report = std::move(result.report);
    out.motion = std::move(result.motion);
    return out;
}

// Positions of one robot over time; absent entries are off the road.
std::vector<std::optional<CellId>> track(const std::vector<Occupancy>& motion, RobotId id) {
    std::vector<std::optional<CellId>> cells;
    for (const auto& occ : motion) {
        auto it = occ.find(id);
        cells.push_back(it == occ.end() ? std::nullopt : std::optional<CellId>(it->second));
    }
    while (!cells.empty() && !cells.back()) {
        cells.pop_back();
    }
    return cells;
}

// True iff every visited cell lies on the path at a non-decreasing index.
bool follows(const std::vector<std::optional<CellId>>& cells, const Path& path) {
    size_t index = 0;
    for (const auto& c : cells) {
        if (!c) {
            continue;
        }
        while (index < path.cells.size() && path.cells[index] != *c) {
            ++index;
        }
        if (index == path.cells.size()) {
            return false;
        }
    }
    return true;
}

}  // namespace

EntryExitReport entry_exit_check(const Scenario& base, const Perturbation& perturbation) {
    Scenario perturbed = base;
    const RobotId target = perturbation.robot.id;
    if (perturbation.kind == Perturbation::Kind::Remove) {
        auto it = std::find_if(perturbed.robots.begin(), perturbed.robots.end(),
                [&](const RobotSpec& r) { return r.id == target; });
        if (it == perturbed.robots.end()) {
            throw std::invalid_argument("no robot " + std::to_string(target) + " to remove");
        }
        perturbed.robots.erase(it);
    } else {
        for (const auto& r : perturbed.robots) {
            if (r.id == target) {
                throw std::invalid_argument("robot " + std::to_string(target) + " already exists");
            }
        }
        perturbed.robots.push_back(perturbation.robot);
    }
    // The perturbed run is not the config's run any more.
    perturbed.config.reset();

    const Observed before = observe(base);
    const Observed after = observe(perturbed);

    EntryExitReport report;
    report.collision_free = !after.collided && after.report.collisions == 0;
    report.deadlock = after.report.deadlock;
    report.completed = after.report.finished == after.report.robots;
    for (const auto& step : after.report.ledger) {
        if (step.paid != step.credited + step.authority) {
            report.budget_balanced = false;
        }
    }
    const bool baseline = base.options.mechanism == MechanismKind::PrioritizedBaseline;
    for (const auto& spec : base.robots) {
        if (spec.id == target) {
            continue;
        }
        auto state = std::find_if(after.robots.begin(), after.robots.end(),
                [&](const RobotState& r) { return r.spec.id == spec.id; });
        auto old_track = track(before.motion, spec.id);
        auto new_track = track(after.motion, spec.id);
        if (!baseline && (state->spec.path != spec.path || !follows(new_track, spec.path))) {
            report.paths_unchanged = false;
        }
        if (old_track != new_track) {
            report.motion_changed.push_back(spec.id);
        }
        auto finish_of = [](const std::vector<RobotState>& robots, RobotId id) {
            for (const auto& r : robots) {
                if (r.spec.id == id) {
                    return r.finished_at;
                }
            }
            return -1;
        };
        const int f0 = finish_of(before.robots, spec.id);
        const int f1 = finish_of(after.robots, spec.id);
        if (f0 >= 0 && f1 >= 0) {
            report.makespan_delta[spec.id] = f1 - f0;
        }
    }
    return report;
}

}  // namespace sparcas
