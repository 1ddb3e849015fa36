#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "report.hpp"
#include "runner.hpp"
#include "sparcas/trace.hpp"
#include "verify.hpp"

using namespace sparcas;
using namespace sparcas::cli;

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_run(const std::string& spec_path, const std::string& preset, bool full_scale, const BatchOptions& batch) {
    ExperimentSpec spec;
    try {
        spec = preset.empty() ? load_experiment(spec_path, full_scale)
                              : load_experiment(preset_path(preset), full_scale);
    } catch (const SpecError& e) {
        std::cerr << "error: bad experiment spec: " << e.what() << "\n";
        return 2;
    }
    std::vector<RunRow> rows;
    try {
        rows = run_batch(spec, batch, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const auto dir = batch.output.value_or(spec.output);
    for (const auto& path : write_outputs(dir, spec, rows)) {
        std::cout << path.string() << "\n";
    }
    int failed = 0;
    for (const auto& r : rows) {
        if (r.status == "error" || r.status == "collision") {
            std::cerr << "run " << r.label << " " << to_string(r.mechanism) << " n=" << r.robots << " seed=" << r.seed
                      << ": " << r.status << ": " << r.error << "\n";
            ++failed;
        }
    }
    return failed == 0 ? 0 : 1;
}

int cmd_replay(const std::string& trace_path, std::string audit_path) {
    auto trace = read_file(trace_path);
    if (!trace) {
        std::cerr << "error: cannot read " << trace_path << "\n";
        return 2;
    }
    if (audit_path.empty()) {
        auto sibling = std::filesystem::path(trace_path).replace_extension(".audit");
        if (std::filesystem::exists(sibling)) {
            audit_path = sibling.string();
        }
    }
    std::optional<std::string> audit;
    if (!audit_path.empty()) {
        audit = read_file(audit_path);
        if (!audit) {
            std::cerr << "error: cannot read " << audit_path << "\n";
            return 2;
        }
    }
    auto result = replay_trace(*trace, audit ? std::optional<std::string_view>(*audit) : std::nullopt);
    if (result.ok()) {
        std::cout << "match: " << trace_path << (audit ? " (with audit log)" : "") << "\n";
        return 0;
    }
    std::cerr << result.message << "\n";
    if (result.status == ReplayResult::Status::Divergence) {
        std::cerr << "  recorded: " << result.expected << "\n  replayed: " << result.actual << "\n";
    }
    return 1;
}

int cmd_simulate(SimConfig config, const std::string& trace_out, const std::string& audit_out,
        const std::string& report_out) {
    RunOptions options;
    options.capture_trace = !trace_out.empty();
    options.capture_audit = !audit_out.empty();
    RunResult result;
    try {
        result = run(config, options);
    } catch (const CollisionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    auto write = [](const std::string& path, const std::string& text) {
        if (path == "-") {
            std::cout << text;
        } else if (!path.empty()) {
            const std::filesystem::path file(path);
            if (file.has_parent_path()) {
                std::filesystem::create_directories(file.parent_path());
            }
            std::ofstream out(file, std::ios::binary);
            out << text;
            if (!out) {
                throw std::runtime_error("cannot write " + path);
            }
        }
    };
    try {
        write(trace_out, result.trace);
        write(audit_out, result.audit);
        write(report_out.empty() ? "-" : report_out, report_json(result.report, config));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparcas: spot-auction multi-robot traffic simulator"};
    app.require_subcommand(1);

    BatchOptions batch;
    batch.jobs = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    std::string spec_path;
    std::string preset;
    std::string out_dir;
    std::string traces;
    bool full_scale = false;
    int seeds = 0;
    double timeout = 0;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment spec (or a preset) over seeds and write CSVs");
    run_cmd->add_option("spec", spec_path, "Experiment spec (JSON)");
    run_cmd->add_option("--preset", preset, "Run a shipped preset (scalability, comparison, class-delays, dynamic, payments)");
    run_cmd->add_option("--seeds", seeds, "Seeds per template (overrides the spec)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--timeout", timeout, "Per-run timeout in seconds (overrides the spec)")
            ->check(CLI::PositiveNumber);
    run_cmd->add_option("--jobs", batch.jobs, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", out_dir, "Output directory (overrides the spec)");
    run_cmd->add_option("--traces", traces, "Traces to keep: none, first-seed, all");
    run_cmd->add_flag("--full-scale", full_scale, "Include the spec's full-scale templates");
    run_cmd->add_flag("!--progress", batch.progress, "Suppress per-run progress lines");

    VerifyOptions verify;
    std::string verify_out = verify.output.string();
    auto* verify_cmd = app.add_subcommand("verify", "Run the property battery and print a pass/fail matrix");
    verify_cmd->add_flag("--full", verify.full, "Use acceptance-sized sweeps");
    verify_cmd->add_option("--out", verify_out, "Directory for counterexample dumps");
    verify_cmd->add_option("--mutate", verify.mutate, "Test hook: tie-break or payment-sign")->group("");

    std::string trace_path;
    std::string audit_path;
    auto* replay_cmd = app.add_subcommand("replay", "Re-execute a trace from its config and compare byte for byte");
    replay_cmd->add_option("trace", trace_path, "Trace file")->required();
    replay_cmd->add_option("--audit", audit_path, "Audit log (default: sibling .audit file if present)");

    SimConfig config;
    std::string mechanism = "sparcas";
    std::string placement = "manager";
    std::vector<int> mix{1, 1, 1};
    std::string trace_out;
    std::string audit_out;
    std::string report_out;
    auto* sim_cmd = app.add_subcommand("simulate", "Run one configuration and print its JSON report");
    sim_cmd->add_option("--width", config.workspace.width, "Workspace width");
    sim_cmd->add_option("--height", config.workspace.height, "Workspace height");
    sim_cmd->add_option("--spacing", config.workspace.block_spacing, "Block cells between road bands");
    sim_cmd->add_option("--robots", config.robots, "Number of robots");
    sim_cmd->add_option("--mix", mix, "Economy regular premium weights")->expected(3);
    sim_cmd->add_option("--late-percent", config.late_percent, "Percent of robots arriving late");
    sim_cmd->add_option("--arrival-window", config.arrival_window, "Late arrivals are uniform in [0, window]");
    sim_cmd->add_option("--mechanism", mechanism, "sparcas, naive or baseline");
    sim_cmd->add_option("--placement", placement, "manager or decentralized");
    sim_cmd->add_option("--seed", config.seed, "RNG seed");
    sim_cmd->add_option("--step-limit", config.step_limit, "Maximum steps");
    sim_cmd->add_option("--trace", trace_out, "Write the trace here ('-' for stdout)");
    sim_cmd->add_option("--audit", audit_out, "Write the audit log here");
    sim_cmd->add_option("--report", report_out, "Write the JSON report here (default stdout)");

    app.add_subcommand("presets", "List shipped presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (spec_path.empty() == preset.empty()) {
                std::cerr << "error: give either a spec file or --preset\n";
                return 2;
            }
            if (seeds > 0) {
                batch.seeds = seeds;
            }
            if (timeout > 0) {
                batch.timeout_seconds = timeout;
            }
            if (!out_dir.empty()) {
                batch.output = out_dir;
            }
            if (!traces.empty()) {
                batch.traces = parse_trace_mode(traces);
            }
            return cmd_run(spec_path, preset, full_scale, batch);
        }
        if (*verify_cmd) {
            verify.output = verify_out;
            auto results = run_verify(verify, std::cout);
            for (const auto& r : results) {
                if (!r.passed) {
                    return 1;
                }
            }
            return 0;
        }
        if (*replay_cmd) {
            return cmd_replay(trace_path, audit_path);
        }
        if (*sim_cmd) {
            config.mechanism = parse_mechanism(mechanism);
            if (placement != "manager" && placement != "decentralized") {
                throw std::invalid_argument("placement must be manager or decentralized");
            }
            config.placement = placement == "manager" ? AuctionPlacement::IntersectionManager
                                                      : AuctionPlacement::Decentralized;
            config.class_mix = {mix[0], mix[1], mix[2]};
            return cmd_simulate(config, trace_out, audit_out, report_out);
        }
        for (const auto& name : preset_names()) {
            std::cout << name << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
