#include <cstdlib>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "experiment.hpp"
#include "runner.hpp"
#include "sparcas/trace.hpp"

using namespace sparcas;
using namespace sparcas::cli;

namespace {

const char* kSmallSpec = R"({
  "name": "small",
  "seeds": 3,
  "timeout_seconds": 30,
  "tables": ["comparison", "class_delays", "payments", "scalability"],
  "templates": [
    {
      "label": "24x24",
      "workspace": {"width": 24, "height": 24, "block_spacing": 6},
      "robots": [8, 16],
      "mechanisms": ["sparcas", "baseline"]
    }
  ]
})";

std::string field_of(const std::string& json) {
    try {
        parse_experiment(json);
    } catch (const SpecError& e) {
        return e.field();
    }
    return "";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

std::map<std::string, size_t> header_index(const std::vector<std::string>& header) {
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < header.size(); ++i) {
        index[header[i]] = i;
    }
    return index;
}

std::string sample_trace() {
    SimConfig c;
    c.workspace = {24, 24, 6};
    c.robots = 12;
    c.seed = 3;
    return run(c).trace;
}

}  // namespace

TEST(ExperimentSpec, ExpandsRobotAndMechanismLists) {
    auto spec = parse_experiment(kSmallSpec);
    EXPECT_EQ(spec.name, "small");
    EXPECT_EQ(spec.seeds, 3);
    EXPECT_EQ(spec.templates.size(), 4u);
    EXPECT_EQ(spec.templates[0].config.workspace, (WorkspaceParams{24, 24, 6}));
}

TEST(ExperimentSpec, ErrorsNameTheField) {
    EXPECT_EQ(field_of("{"), "<document>");
    EXPECT_EQ(field_of(R"({"name": "x", "seeds": 0, "templates": []})"), "seeds");
    EXPECT_EQ(field_of(R"({"name": "x", "templates": [{"robots": "many"}]})"), "templates[0].robots");
    EXPECT_EQ(field_of(R"({"name": "x", "templates": [{"robots": [1, "a"]}]})"), "templates[0].robots[1]");
    EXPECT_EQ(field_of(R"({"name": "x", "templates": [{"robots": 5, "mechanisms": "fast"}]})"),
            "templates[0].mechanisms");
    EXPECT_EQ(field_of(R"({"name": "x", "tables": ["pie"], "templates": [{"robots": 5}]})"), "tables[0]");
    EXPECT_EQ(field_of(R"({"name": "x", "templates": [{"robots": 5, "late_percent": 120}]})"),
            "templates[0].late_percent");
}

TEST(ExperimentSpec, EveryPresetParses) {
    auto names = preset_names();
    EXPECT_GE(names.size(), 5u);
    for (const auto& name : names) {
        EXPECT_NO_THROW(load_experiment(preset_path(name))) << name;
        EXPECT_NO_THROW(load_experiment(preset_path(name), true)) << name;
    }
    EXPECT_THROW(preset_path("nope"), SpecError);
}

TEST(ExperimentSpec, TraceModes) {
    EXPECT_EQ(parse_trace_mode("none"), TraceMode::None);
    EXPECT_EQ(parse_trace_mode("first-seed"), TraceMode::FirstSeed);
    EXPECT_EQ(parse_trace_mode("all"), TraceMode::All);
    EXPECT_THROW(parse_trace_mode("some"), std::invalid_argument);
}

TEST(Runner, AggregatesMatchRecomputationFromRunsCsv) {
    auto spec = parse_experiment(kSmallSpec);
    BatchOptions options;
    options.progress = false;
    std::ostringstream log;
    auto rows = run_batch(spec, options, log);
    ASSERT_EQ(rows.size(), 12u);

    auto runs = parse_csv(runs_csv(rows));
    auto col = header_index(runs[0]);
    std::map<std::pair<std::string, std::string>, std::pair<double, int>> makespan;
    std::map<std::string, std::pair<double, int>> premium_wait;
    for (size_t i = 1; i < runs.size(); ++i) {
        const auto& r = runs[i];
        EXPECT_EQ(r[col["status"]], "ok");
        auto& m = makespan[{r[col["n"]], r[col["mechanism"]]}];
        m.first += std::stod(r[col["makespan"]]);
        m.second += 1;
        if (r[col["mechanism"]] == "sparcas") {
            auto& w = premium_wait[r[col["n"]]];
            w.first += std::stod(r[col["mean_wait_premium"]]);
            w.second += 1;
        }
    }

    auto comparison = parse_csv(aggregate_csv("comparison", rows));
    auto cc = header_index(comparison[0]);
    ASSERT_EQ(comparison.size(), 5u);
    for (size_t i = 1; i < comparison.size(); ++i) {
        const auto& r = comparison[i];
        auto [sum, count] = makespan.at({r[cc["n"]], r[cc["mechanism"]]});
        EXPECT_NEAR(std::stod(r[cc["makespan"]]), sum / count, 1e-9);
        EXPECT_EQ(std::stoi(r[cc["runs"]]), count);
    }

    auto classes = parse_csv(aggregate_csv("class_delays", rows));
    auto kc = header_index(classes[0]);
    for (size_t i = 1; i < classes.size(); ++i) {
        const auto& r = classes[i];
        if (r[kc["class"]] == "premium") {
            auto [sum, count] = premium_wait.at(r[kc["n"]]);
            EXPECT_NEAR(std::stod(r[kc["mean_wait"]]), sum / count, 1e-9);
        }
    }

    auto scal = parse_csv(aggregate_csv("scalability", rows));
    EXPECT_EQ(scal[0], (std::vector<std::string>{"workspace", "n", "offline_time", "auction_time", "planning_time",
                               "runs", "censored"}));
    EXPECT_EQ(scal.size(), 3u);
}

TEST(Runner, NumbersRoundTrip) {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 12345.678}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
}

TEST(Replay, FreshTraceMatches) {
    auto trace = sample_trace();
    auto result = replay_trace(trace);
    EXPECT_TRUE(result.ok()) << result.message;
}

TEST(Replay, TruncatedTraceIsAParseErrorWithLine) {
    auto trace = sample_trace();
    auto cut = trace.substr(0, trace.size() / 2);
    cut = cut.substr(0, cut.rfind('\n') + 1);
    const int lines = static_cast<int>(std::count(cut.begin(), cut.end(), '\n'));
    auto result = replay_trace(cut);
    EXPECT_EQ(result.status, ReplayResult::Status::ParseFailure);
    EXPECT_EQ(result.line, lines + 1);
    EXPECT_NE(result.message.find("truncated"), std::string::npos);
}

TEST(Replay, GarbledFieldNamesItsLine) {
    auto trace = sample_trace();
    auto at = trace.find("action=advance");
    trace.replace(at, 14, "action=sideway");
    const int line = static_cast<int>(std::count(trace.begin(), trace.begin() + static_cast<long>(at), '\n')) + 1;
    auto result = replay_trace(trace);
    EXPECT_EQ(result.status, ReplayResult::Status::ParseFailure);
    EXPECT_EQ(result.line, line);
}

TEST(Replay, EditedPaymentFailsReconciliation) {
    auto trace = sample_trace();
    auto at = trace.find(" payment=0 ");
    ASSERT_NE(at, std::string::npos);
    trace.replace(at, 11, " payment=1 ");
    auto result = replay_trace(trace);
    EXPECT_EQ(result.status, ReplayResult::Status::ReconciliationFailure);
}

TEST(Replay, EditedPositionDiverges) {
    auto trace = sample_trace();
    auto at = trace.find("step t=3 ");
    ASSERT_NE(at, std::string::npos);
    auto pos = trace.find("pos=", at);
    trace.insert(pos + 4, "1");
    auto result = replay_trace(trace);
    EXPECT_EQ(result.status, ReplayResult::Status::Divergence);
    EXPECT_EQ(result.line,
            static_cast<int>(std::count(trace.begin(), trace.begin() + static_cast<long>(at), '\n')) + 1);
}

TEST(Replay, AuditLogIsCompared) {
    SimConfig c;
    c.workspace = {24, 24, 6};
    c.robots = 12;
    c.seed = 3;
    auto result = run(c);
    EXPECT_TRUE(replay_trace(result.trace, result.audit).ok());
    auto audit = result.audit;
    auto at = audit.find("t=");
    audit.insert(at + 2, "9");
    EXPECT_FALSE(replay_trace(result.trace, audit).ok());
}

TEST(ExperimentSpec, SeedBaseComesFromTheEnvironment) {
    ::setenv("SPARCAS_SEED_BASE", "40", 1);
    EXPECT_EQ(seed_base(), 40u);
    ::unsetenv("SPARCAS_SEED_BASE");
}
