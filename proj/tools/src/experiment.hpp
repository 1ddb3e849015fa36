#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparcas/simulator.hpp"

namespace sparcas::cli {

enum class TraceMode { None, FirstSeed, All };

struct Template {
    std::string label;
    SimConfig config;  // seed is filled in per run
};

struct ExperimentSpec {
    std::string name;
    std::vector<Template> templates;
    int seeds = 20;
    double timeout_seconds = 60;
    std::filesystem::path output = "out";
    // Aggregated tables to write: scalability, comparison, class_delays,
    // dynamic, payments.
    std::vector<std::string> tables;
    TraceMode traces = TraceMode::FirstSeed;
};

/// Spec error naming the offending field, e.g. "templates[1].robots".
class SpecError : public std::runtime_error {
public:
    SpecError(std::string field, const std::string& message)
            : std::runtime_error(field + ": " + message)
            , _field(std::move(field)) {}

    const std::string& field() const { return _field; }

private:
    std::string _field;
};

/// Parses a JSON experiment spec. Each template may list several robot
/// counts and mechanisms; they expand into one Template per combination.
/// `full_scale_templates` are included only when `full_scale` is set.
ExperimentSpec parse_experiment(const std::string& json_text, bool full_scale = false);
ExperimentSpec load_experiment(const std::filesystem::path& path, bool full_scale = false);

/// Locates presets/<name>.json: $SPARCAS_PRESET_DIR, then the source tree,
/// then the install prefix.
std::filesystem::path preset_path(const std::string& name);
std::vector<std::string> preset_names();

TraceMode parse_trace_mode(const std::string& text);

/// $SPARCAS_SEED_BASE, or 0.
std::uint64_t seed_base();

}  // namespace sparcas::cli
