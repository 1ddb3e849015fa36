#include "runner.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "sparcas/trace.hpp"

namespace sparcas::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct Job {
    const Template* tpl;
    std::uint64_t seed;
    bool keep_trace;
};

std::string file_stem(const Job& job) {
    std::string label;
    for (char c : job.tpl->label) {
        label += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    }
    return label + "-" + to_string(job.tpl->config.mechanism) + "-n" + std::to_string(job.tpl->config.robots) +
           "-s" + std::to_string(job.seed);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

RunRow execute(const Job& job, double timeout, const std::filesystem::path& dir) {
    SimConfig config = job.tpl->config;
    config.seed = job.seed;
    RunRow row;
    row.label = job.tpl->label;
    row.width = config.workspace.width;
    row.height = config.workspace.height;
    row.robots = config.robots;
    row.late_percent = config.late_percent;
    row.mechanism = config.mechanism;
    row.seed = job.seed;

    RunOptions options;
    options.capture_trace = job.keep_trace;
    options.capture_audit = job.keep_trace;
    const auto started = Clock::now();
    options.deadline = started + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout));
    try {
        auto result = run(config, options);
        const auto& r = result.report;
        row.makespan = r.makespan;
        row.finished = r.finished;
        row.offline_time = r.offline_seconds;
        row.auction_time = r.auction_seconds;
        row.baseline_time = r.baseline_planning_seconds;
        row.planning_time = r.planning_seconds();
        row.mean_execution_time = r.mean_execution_time;
        for (const auto& [cls, summary] : r.per_class) {
            row.mean_wait[static_cast<size_t>(cls)] = summary.mean_wait;
            row.mean_payment[static_cast<size_t>(cls)] = summary.mean_payment;
        }
        row.mean_payment_all = r.robots > 0 ? to_double(r.total_paid) / r.robots : 0;
        row.fraction_never_paid = r.fraction_never_paid;
        row.max_ring_occupancy = r.max_ring_occupancy;
        row.auctions = r.auctions;
        row.total_paid = to_exact_string(r.total_paid);
        row.authority = to_exact_string(r.authority_holdings);
        if (r.timed_out) {
            row.status = "timeout";
            row.planning_time = timeout;
        } else if (r.deadlock) {
            row.status = "deadlock";
        } else if (r.step_limit_reached) {
            row.status = "step_limit";
        }
        if (job.keep_trace) {
            write_file(dir / "traces" / (file_stem(job) + ".trace"), result.trace);
            write_file(dir / "traces" / (file_stem(job) + ".audit"), result.audit);
        }
    } catch (const CollisionError& e) {
        row.status = "collision";
        row.error = e.what();
        write_file(dir / "traces" / (file_stem(job) + ".trace"), e.trace());
    } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
    }
    row.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
    return row;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
    }
    return out + "\"";
}

struct Mean {
    double sum = 0;
    int count = 0;

    void add(double v) {
        sum += v;
        ++count;
    }
    double value() const { return count > 0 ? sum / count : 0; }
};

}  // namespace

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return ec == std::errc() ? std::string(buf, ptr) : std::to_string(value);
}

std::vector<RunRow> run_batch(const ExperimentSpec& spec, const BatchOptions& options, std::ostream& log) {
    const int seeds = options.seeds.value_or(spec.seeds);
    const double timeout = options.timeout_seconds.value_or(spec.timeout_seconds);
    const auto dir = options.output.value_or(spec.output);
    const auto traces = options.traces.value_or(spec.traces);
    if (seeds < 1) {
        throw std::invalid_argument("--seeds must be >= 1");
    }
    if (timeout <= 0) {
        throw std::invalid_argument("--timeout must be positive");
    }
    const std::uint64_t base = seed_base();
    std::vector<Job> jobs;
    for (const auto& tpl : spec.templates) {
        for (int s = 0; s < seeds; ++s) {
            const bool keep = traces == TraceMode::All || (traces == TraceMode::FirstSeed && s == 0);
            jobs.push_back({&tpl, base + static_cast<std::uint64_t>(s), keep});
        }
    }
    std::vector<RunRow> rows(jobs.size());
    std::atomic<size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (size_t i = next++; i < jobs.size(); i = next++) {
            rows[i] = execute(jobs[i], timeout, dir);
            if (options.progress) {
                std::lock_guard lock(log_mutex);
                const auto& r = rows[i];
                log << "[" << (i + 1) << "/" << jobs.size() << "] " << r.label << " " << to_string(r.mechanism)
                    << " n=" << r.robots << " seed=" << r.seed << " " << r.status << " makespan=" << r.makespan
                    << " planning=" << format_number(r.planning_time) << "s\n";
            }
        }
    };
    const int workers = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    return rows;
}

std::string runs_csv(const std::vector<RunRow>& rows) {
    std::ostringstream out;
    out << "# sparcas runs v1\n"
        << "label,workspace,n,late_percent,mechanism,seed,status,makespan,finished,offline_time,auction_time,"
           "baseline_time,planning_time,mean_execution_time,mean_wait_economy,mean_wait_regular,mean_wait_premium,"
           "mean_payment_economy,mean_payment_regular,mean_payment_premium,mean_payment,fraction_never_paid,"
           "max_ring_occupancy,auctions,total_paid,authority,wall_time,error\n";
    for (const auto& r : rows) {
        out << csv_escape(r.label) << ',' << r.workspace() << ',' << r.robots << ',' << r.late_percent << ','
            << to_string(r.mechanism) << ',' << r.seed << ',' << r.status << ',' << r.makespan << ',' << r.finished
            << ',' << format_number(r.offline_time) << ',' << format_number(r.auction_time) << ','
            << format_number(r.baseline_time) << ',' << format_number(r.planning_time) << ','
            << format_number(r.mean_execution_time);
        for (double v : r.mean_wait) {
            out << ',' << format_number(v);
        }
        for (double v : r.mean_payment) {
            out << ',' << format_number(v);
        }
        out << ',' << format_number(r.mean_payment_all) << ',' << format_number(r.fraction_never_paid) << ','
            << r.max_ring_occupancy << ',' << r.auctions << ',' << r.total_paid << ',' << r.authority << ','
            << format_number(r.wall_time) << ',' << csv_escape(r.error) << '\n';
    }
    return out.str();
}

std::string aggregate_csv(const std::string& table, const std::vector<RunRow>& rows) {
    std::ostringstream out;
    out << "# sparcas " << table << " v1\n";
    auto usable = [](const RunRow& r) { return r.status != "error" && r.status != "collision"; };

    if (table == "scalability") {
        out << "workspace,n,offline_time,auction_time,planning_time,runs,censored\n";
        std::map<std::tuple<int, int, int>, std::array<Mean, 3>> groups;
        std::map<std::tuple<int, int, int>, int> censored;
        for (const auto& r : rows) {
            if (r.mechanism != MechanismKind::Sparcas || !usable(r)) {
                continue;
            }
            auto& g = groups[{r.width, r.height, r.robots}];
            g[0].add(r.offline_time);
            g[1].add(r.auction_time);
            g[2].add(r.planning_time);
            censored[{r.width, r.height, r.robots}] += r.censored() ? 1 : 0;
        }
        for (const auto& [key, g] : groups) {
            const auto [w, h, n] = key;
            out << w << 'x' << h << ',' << n << ',' << format_number(g[0].value()) << ','
                << format_number(g[1].value()) << ',' << format_number(g[2].value()) << ',' << g[0].count << ','
                << censored[key] << '\n';
        }
    } else if (table == "comparison" || table == "dynamic") {
        const bool dynamic = table == "dynamic";
        out << (dynamic ? "workspace,n,late_percent,mechanism,planning_time,makespan,mean_execution_time,runs,censored,"
                          "deadlocks\n"
                        : "workspace,n,mechanism,planning_time,makespan,mean_execution_time,runs,censored,"
                          "deadlocks\n");
        using Key = std::tuple<int, int, int, int, int>;
        std::map<Key, std::array<Mean, 3>> groups;
        std::map<Key, std::array<int, 2>> counts;
        for (const auto& r : rows) {
            if (!usable(r)) {
                continue;
            }
            Key key{r.width, r.height, r.robots, r.late_percent, static_cast<int>(r.mechanism)};
            auto& g = groups[key];
            g[0].add(r.planning_time);
            g[1].add(r.makespan);
            g[2].add(r.mean_execution_time);
            counts[key][0] += r.censored() ? 1 : 0;
            counts[key][1] += r.status == "deadlock" ? 1 : 0;
        }
        for (const auto& [key, g] : groups) {
            const auto [w, h, n, late, mech] = key;
            out << w << 'x' << h << ',' << n << ',';
            if (dynamic) {
                out << late << ',';
            }
            out << to_string(static_cast<MechanismKind>(mech)) << ',' << format_number(g[0].value()) << ','
                << format_number(g[1].value()) << ',' << format_number(g[2].value()) << ',' << g[0].count << ','
                << counts[key][0] << ',' << counts[key][1] << '\n';
        }
    } else if (table == "class_delays") {
        out << "workspace,n,class,mean_wait,mean_payment,runs\n";
        std::map<std::tuple<int, int, int, int>, std::array<Mean, 2>> groups;
        for (const auto& r : rows) {
            if (r.mechanism != MechanismKind::Sparcas || !usable(r)) {
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                auto& g = groups[{r.width, r.height, r.robots, c}];
                g[0].add(r.mean_wait[static_cast<size_t>(c)]);
                g[1].add(r.mean_payment[static_cast<size_t>(c)]);
            }
        }
        for (const auto& [key, g] : groups) {
            const auto [w, h, n, c] = key;
            out << w << 'x' << h << ',' << n << ',' << to_string(static_cast<RobotClass>(c)) << ','
                << format_number(g[0].value()) << ',' << format_number(g[1].value()) << ',' << g[0].count << '\n';
        }
    } else if (table == "payments") {
        out << "workspace,n,fraction_never_paid,mean_payment,runs\n";
        std::map<std::tuple<int, int, int>, std::array<Mean, 2>> groups;
        for (const auto& r : rows) {
            if (r.mechanism != MechanismKind::Sparcas || !usable(r)) {
                continue;
            }
            auto& g = groups[{r.width, r.height, r.robots}];
            g[0].add(r.fraction_never_paid);
            g[1].add(r.mean_payment_all);
        }
        for (const auto& [key, g] : groups) {
            const auto [w, h, n] = key;
            out << w << 'x' << h << ',' << n << ',' << format_number(g[0].value()) << ','
                << format_number(g[1].value()) << ',' << g[0].count << '\n';
        }
    } else {
        throw std::invalid_argument("unknown table '" + table + "'");
    }
    return out.str();
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
        const std::vector<RunRow>& rows) {
    std::vector<std::filesystem::path> written;
    write_file(dir / "runs.csv", runs_csv(rows));
    written.push_back(dir / "runs.csv");
    for (const auto& table : spec.tables) {
        auto path = dir / (table + ".csv");
        write_file(path, aggregate_csv(table, rows));
        written.push_back(path);
    }
    return written;
}

}  // namespace sparcas::cli
