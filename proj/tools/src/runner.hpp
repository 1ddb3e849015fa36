#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace sparcas::cli {

/// One (template, seed) run. Written verbatim to runs.csv; every aggregated
/// table is computed from these rows only.
struct RunRow {
    std::string label;
    int width = 0;
    int height = 0;
    int robots = 0;
    int late_percent = 0;
    MechanismKind mechanism = MechanismKind::Sparcas;
    std::uint64_t seed = 0;
    // ok, timeout, deadlock, step_limit, collision or error.
    std::string status = "ok";
    int makespan = 0;
    int finished = 0;
    double offline_time = 0;
    double auction_time = 0;
    double baseline_time = 0;
    // Censored runs carry the timeout here.
    double planning_time = 0;
    double mean_execution_time = 0;
    std::array<double, 3> mean_wait{};
    std::array<double, 3> mean_payment{};
    double mean_payment_all = 0;
    double fraction_never_paid = 0;
    int max_ring_occupancy = 0;
    int auctions = 0;
    std::string total_paid = "0";
    std::string authority = "0";
    double wall_time = 0;
    std::string error;

    std::string workspace() const { return std::to_string(width) + "x" + std::to_string(height); }
    bool censored() const { return status == "timeout"; }
};

struct BatchOptions {
    int jobs = 1;
    std::optional<int> seeds;
    std::optional<double> timeout_seconds;
    std::optional<std::filesystem::path> output;
    std::optional<TraceMode> traces;
    bool progress = true;
};

std::vector<RunRow> run_batch(const ExperimentSpec& spec, const BatchOptions& options, std::ostream& log);

std::string format_number(double value);

std::string runs_csv(const std::vector<RunRow>& rows);
/// Aggregated table by name (scalability, comparison, class_delays, dynamic,
/// payments).
std::string aggregate_csv(const std::string& table, const std::vector<RunRow>& rows);

/// Writes runs.csv plus the spec's tables into `dir`; returns written paths.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
        const std::vector<RunRow>& rows);

}  // namespace sparcas::cli
