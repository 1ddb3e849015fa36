#include "report.hpp"

#include "json.hpp"

namespace sparcas::cli {

std::string report_json(const SimReport& r, const SimConfig& config) {
    using nlohmann::json;
    json doc;
    doc["config"] = {
            {"width", config.workspace.width},
            {"height", config.workspace.height},
            {"block_spacing", config.workspace.block_spacing},
            {"robots", config.robots},
            {"class_mix", config.class_mix},
            {"late_percent", config.late_percent},
            {"arrival_window", config.arrival_window},
            {"mechanism", to_string(config.mechanism)},
            {"seed", config.seed},
    };
    doc["makespan"] = r.makespan;
    doc["steps"] = r.steps;
    doc["finished"] = r.finished;
    doc["deadlock"] = r.deadlock;
    doc["step_limit_reached"] = r.step_limit_reached;
    doc["timed_out"] = r.timed_out;
    doc["collisions"] = r.collisions;
    doc["max_ring_occupancy"] = r.max_ring_occupancy;
    doc["auctions"] = r.auctions;
    doc["fraction_never_paid"] = r.fraction_never_paid;
    doc["mean_execution_time"] = r.mean_execution_time;
    doc["total_paid"] = to_exact_string(r.total_paid);
    doc["total_credited"] = to_exact_string(r.total_credited);
    doc["authority_holdings"] = to_exact_string(r.authority_holdings);
    doc["time"] = {
            {"offline_seconds", r.offline_seconds},
            {"auction_seconds", r.auction_seconds},
            {"baseline_planning_seconds", r.baseline_planning_seconds},
            {"planning_seconds", r.planning_seconds()},
    };
    json classes = json::object();
    for (const auto& [cls, s] : r.per_class) {
        classes[to_string(cls)] = {{"robots", s.robots}, {"mean_wait", s.mean_wait},
                {"mean_payment", s.mean_payment}, {"mean_value", s.mean_value}};
    }
    doc["classes"] = classes;
    json robots = json::array();
    for (const auto& p : r.per_robot) {
        robots.push_back({{"id", p.id}, {"class", to_string(p.cls)}, {"arrival", p.arrival_time},
                {"injected", p.injected_at}, {"finished", p.finished_at}, {"path_length", p.path_length},
                {"execution_time", p.execution_time}, {"wait_time", p.wait_time}, {"auctions", p.auctions},
                {"value", to_exact_string(p.value)}, {"paid", to_exact_string(p.paid)},
                {"credited", to_exact_string(p.credited)}});
    }
    doc["robots"] = robots;
    doc["anomalies"] = r.anomalies;
    return doc.dump(2) + "\n";
}

}  // namespace sparcas::cli
