#include <chrono>
#include <map>
#include <mutex>
#include <random>

#include "sparcas/simulator.hpp"

namespace sparcas {

namespace {

// Uniform integer in [0, n) by rejection; the same on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t x = rng();
        if (x >= threshold) {
            return x % n;
        }
    }
}

RobotClass draw_class(std::mt19937_64& rng, const std::array<int, 3>& mix) {
    const auto total = static_cast<std::uint64_t>(mix[0] + mix[1] + mix[2]);
    auto x = static_cast<int>(uniform_below(rng, total));
    for (int c = 0; c < 3; ++c) {
        if (x < mix[static_cast<size_t>(c)]) {
            return static_cast<RobotClass>(c);
        }
        x -= mix[static_cast<size_t>(c)];
    }
    return RobotClass::Premium;
}

void validate(const SimConfig& c) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid config: " + msg); };
    if (c.robots < 0) {
        fail("robots must be >= 0");
    }
    if (c.class_mix[0] < 0 || c.class_mix[1] < 0 || c.class_mix[2] < 0 ||
            c.class_mix[0] + c.class_mix[1] + c.class_mix[2] <= 0) {
        fail("class mix weights must be >= 0 with a positive sum");
    }
    if (c.late_percent < 0 || c.late_percent > 100) {
        fail("late_percent must be in [0, 100]");
    }
    if (c.arrival_window < 0) {
        fail("arrival_window must be >= 0");
    }
    if (c.step_limit < 1) {
        fail("step_limit must be >= 1");
    }
    if (c.deadlock_window < 1) {
        fail("deadlock_window must be >= 1");
    }
    if (c.mini_slot_ms < 0) {
        fail("mini_slot_ms must be >= 0");
    }
}

}  // namespace

const char* to_string(RobotClass cls) {
    switch (cls) {
        case RobotClass::Economy:
            return "economy";
        case RobotClass::Regular:
            return "regular";
        case RobotClass::Premium:
            return "premium";
    }
    return "?";
}

Money class_weight(RobotClass cls) {
    switch (cls) {
        case RobotClass::Economy:
            return Money(1, 50);
        case RobotClass::Regular:
            return Money(13, 200);
        case RobotClass::Premium:
            return Money(1, 5);
    }
    throw std::invalid_argument("unknown robot class");
}

const char* to_string(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::Naive:
            return "naive";
        case MechanismKind::Sparcas:
            return "sparcas";
        case MechanismKind::PrioritizedBaseline:
            return "baseline";
    }
    return "?";
}

MechanismKind parse_mechanism(std::string_view name) {
    if (name == "naive") {
        return MechanismKind::Naive;
    }
    if (name == "sparcas") {
        return MechanismKind::Sparcas;
    }
    if (name == "baseline") {
        return MechanismKind::PrioritizedBaseline;
    }
    throw std::invalid_argument("unknown mechanism '" + std::string(name) + "' (naive, sparcas, baseline)");
}

std::shared_ptr<const Workspace> shared_grid(const WorkspaceParams& params) {
    static std::mutex mutex;
    static std::map<std::array<int, 3>, std::shared_ptr<const Workspace>> cache;
    const std::array<int, 3> key{params.width, params.height, params.block_spacing};
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto grid = std::make_shared<const Workspace>(generate_grid(params.width, params.height, params.block_spacing));
        it = cache.emplace(key, std::move(grid)).first;
    }
    return it->second;
}

Scenario make_scenario(const SimConfig& config) {
    validate(config);
    Scenario scenario;
    scenario.workspace = shared_grid(config.workspace);
    scenario.config = config;
    scenario.options.mechanism = config.mechanism;
    scenario.options.placement = config.placement;
    scenario.options.step_limit = config.step_limit;
    scenario.options.deadlock_window = config.deadlock_window;
    scenario.options.mini_slot_ms = config.mini_slot_ms;

    const auto& w = *scenario.workspace;
    const auto& service = w.service_cells();
    if (config.robots > 0 && service.size() < 2) {
        throw std::invalid_argument("workspace has fewer than two service cells");
    }
    std::mt19937_64 rng(config.seed);
    const int late = (config.robots * config.late_percent + 50) / 100;
    const int window = config.arrival_window > 0 ? config.arrival_window : w.width();
    for (int i = 0; i < config.robots; ++i) {
        RobotSpec spec;
        spec.id = i;
        spec.cls = draw_class(rng, config.class_mix);
        spec.weight = class_weight(spec.cls);
        spec.source = service[uniform_below(rng, service.size())];
        // Goals sharing the source's access lane would make an empty trip.
        do {
            spec.goal = service[uniform_below(rng, service.size())];
        } while (w.access_lane(spec.goal) == w.access_lane(spec.source));
        if (i >= config.robots - late) {
            spec.arrival_time = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(window) + 1));
        }
        const auto started = std::chrono::steady_clock::now();
        spec.path = shortest_path(w, w.access_lane(spec.source), w.access_lane(spec.goal));
        spec.planning_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        scenario.robots.push_back(std::move(spec));
    }
    return scenario;
}

}  // namespace sparcas
