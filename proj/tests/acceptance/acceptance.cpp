// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sparcas/audit.hpp"
#include "sparcas/instances.hpp"
#include "sparcas/oracle.hpp"
#include "sparcas/simulator.hpp"
#include "sparcas/trace.hpp"

using namespace sparcas;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kTimeoutSeconds = 60;
constexpr double kMinNeverPaid = 0.80;
constexpr double kMaxMeanRatio = 1.25;

struct Verdict {
    bool pass = true;
    std::string detail;
};

struct Emitted {
    SimConfig config;
    std::string trace;
    std::string audit;
    SimReport report;
    std::vector<Occupancy> motion;
};

int failures = 0;

void print(int criterion, const std::string& name, const Verdict& v, double seconds) {
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", criterion, name.c_str(),
            v.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

template <typename F>
void criterion(int number, const std::string& name, F&& body) {
    const auto start = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    print(number, name, v, std::chrono::duration<double>(Clock::now() - start).count());
}

std::string fmt(double x, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

SimConfig grid_config(int robots, std::uint64_t seed, MechanismKind mech) {
    SimConfig c;
    c.workspace = {100, 100, 8};
    c.robots = robots;
    c.seed = seed;
    c.mechanism = mech;
    return c;
}

Emitted execute(const SimConfig& config, bool motion) {
    RunOptions options;
    options.capture_motion = motion;
    options.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                              std::chrono::duration<double>(kTimeoutSeconds));
    auto result = run(config, options);
    return {config, std::move(result.trace), std::move(result.audit), std::move(result.report),
            std::move(result.motion)};
}

// Independent collision count over recorded frames: shared cells, moves into
// a cell whose occupant stayed, and swaps.
int count_collisions(const std::vector<Occupancy>& frames) {
    int flags = 0;
    for (size_t t = 0; t + 1 < frames.size(); ++t) {
        const auto& before = frames[t];
        const auto& after = frames[t + 1];
        std::map<CellId, int> load;
        for (const auto& [id, cell] : after) {
            flags += ++load[cell] > 1 ? 1 : 0;
        }
        std::map<CellId, RobotId> held;
        for (const auto& [id, cell] : before) {
            held[cell] = id;
        }
        for (const auto& [id, cell] : after) {
            auto from = before.find(id);
            if (from == before.end() || from->second == cell) {
                continue;
            }
            auto other = held.find(cell);
            if (other == held.end()) {
                continue;
            }
            auto other_now = after.find(other->second);
            if (other_now != after.end() && other_now->second == from->second) {
                ++flags;
            }
        }
    }
    return flags;
}

int ring_peak(const Workspace& w, const std::vector<Occupancy>& frames) {
    int peak = 0;
    for (const auto& frame : frames) {
        std::map<int, int> load;
        for (const auto& [id, cell] : frame) {
            if (w.cell(cell).kind == CellKind::RingSlot) {
                peak = std::max(peak, ++load[w.cell(cell).intersection]);
            }
        }
    }
    return peak;
}

struct MoneyCheck {
    int step_imbalances = 0;
    int authority_violations = 0;
    int negative_payments = 0;
    int negative_payoffs = 0;
    int robots = 0;
    int never_paid = 0;
};

// Recomputes the per-step money flows from the trace and audit text.
MoneyCheck check_money(const Emitted& e) {
    MoneyCheck out;
    const auto trace = parse_trace(e.trace);
    std::map<int, Money> balance;
    std::map<int, Money> authority;
    std::map<int, std::set<RobotId>> present;
    std::map<RobotId, bool> paid;
    for (const auto& s : trace.steps) {
        balance[s.t] += s.payment - s.credit;
        present[s.t].insert(s.robot);
        paid[s.robot] = paid[s.robot] || s.payment > 0;
        out.negative_payments += s.payment < 0 ? 1 : 0;
        out.negative_payoffs += s.value - s.payment < 0 ? 1 : 0;
    }
    for (const auto& a : trace.authority) {
        balance[a.t] -= a.amount;
        authority[a.t] += a.amount;
    }
    for (const auto& [t, b] : balance) {
        out.step_imbalances += b != 0 ? 1 : 0;
    }
    // A step may keep money with the authority only if some paying
    // intersection had nobody outside it.
    std::map<int, bool> stranded;
    for (const auto& entry : parse_audit_log(e.audit)) {
        if (const auto* rec = std::get_if<AuctionRecord>(&entry)) {
            Money total = 0;
            for (const auto& [id, p] : rec->outcome.payments) {
                total += p;
            }
            if (total > 0 && present[rec->t].size() <= rec->announcements.size()) {
                stranded[rec->t] = true;
            }
        }
    }
    for (const auto& [t, amount] : authority) {
        if (amount != 0 && !stranded[t]) {
            ++out.authority_violations;
        }
    }
    out.robots = static_cast<int>(paid.size());
    for (const auto& [id, p] : paid) {
        out.never_paid += p ? 0 : 1;
    }
    return out;
}

}  // namespace

int main() {
    std::filesystem::create_directories("acceptance-artifacts");
    std::vector<Emitted> sparcas_runs;
    std::vector<Emitted> replayable;

    criterion(1, "collision-freedom", [&]() -> Verdict {
        const std::vector<std::pair<int, int>> plan{{10, 80}, {50, 80}, {100, 20}, {200, 20}};
        int flags = 0;
        int runs = 0;
        int timeouts = 0;
        for (const auto& [n, seeds] : plan) {
            for (int s = 1; s <= seeds; ++s) {
                auto e = execute(grid_config(n, static_cast<std::uint64_t>(s), MechanismKind::Sparcas), true);
                flags += e.report.collisions + count_collisions(e.motion);
                timeouts += e.report.timed_out ? 1 : 0;
                e.motion.clear();
                e.motion.shrink_to_fit();
                sparcas_runs.push_back(std::move(e));
                ++runs;
            }
        }
        return {flags == 0 && runs == 200,
                std::to_string(runs) + " runs, " + std::to_string(flags) + " collision flags (required 0), " +
                        std::to_string(timeouts) + " timeouts"};
    });

    criterion(2, "deadlock regression", [&]() -> Verdict {
        Simulation naive(four_robot_fixture(MechanismKind::Naive));
        while (!naive.finished()) {
            naive.step();
        }
        const auto& activity = naive.activity();
        int last_move = -1;
        for (size_t t = 0; t < activity.size(); ++t) {
            if (activity[t].advances > 0) {
                last_move = static_cast<int>(t);
            }
        }
        const int idle_before_flag = naive.now() - (last_move + 1);
        auto naive_report = naive.finish().report;

        auto scenario = four_robot_fixture(MechanismKind::Sparcas);
        RunOptions options;
        options.capture_motion = true;
        auto sparcas = simulate(scenario, options);
        const int peak = ring_peak(*scenario.workspace, sparcas.motion);
        const bool pass = naive_report.deadlock && idle_before_flag <= 10 && !sparcas.report.deadlock &&
                          sparcas.report.finished == 4 && peak <= 3;
        return {pass, "naive deadlock=" + std::string(naive_report.deadlock ? "true" : "false") + " after " +
                              std::to_string(idle_before_flag) + " idle steps (limit 10); sparcas finished " +
                              std::to_string(sparcas.report.finished) + "/4 in " +
                              std::to_string(sparcas.report.makespan) + " steps, peak ring occupancy " +
                              std::to_string(peak) + " (limit 3)"};
    });

    criterion(3, "local efficiency", [&]() -> Verdict {
        std::mt19937_64 rng(20240301);
        int mismatches = 0;
        int payment_mismatches = 0;
        const int instances = 10000;
        for (int i = 0; i < instances; ++i) {
            auto inst = random_auction_instance(rng, 1 + i % 6);
            auto got = sparcas_auction(inst.ring, inst.announcements, inst.blocked);
            auto ref = oracle::oracle_auction(inst.ring, inst.announcements, inst.blocked);
            Money chosen = 0;
            for (const auto& a : inst.announcements) {
                chosen += got.chosen.advances(a.robot) ? a.reported_value : Money(0);
            }
            mismatches += chosen != ref.welfare ? 1 : 0;
            payment_mismatches += got.payments != ref.payments ? 1 : 0;
        }
        return {mismatches == 0, std::to_string(instances) + " instances, " + std::to_string(mismatches) +
                                         " welfare mismatches (required 0), " +
                                         std::to_string(payment_mismatches) + " payment mismatches"};
    });

    criterion(4, "truthfulness", [&]() -> Verdict {
        std::mt19937_64 rng(20240302);
        size_t deviations = 0;
        size_t checked = 0;
        for (int i = 0; i < 500; ++i) {
            auto inst = random_auction_instance(rng, 4);
            auto verdict = oracle::misreport_sweep(inst.ring, inst.announcements, inst.blocked);
            deviations += verdict.deviations.size();
            checked += verdict.misreports_checked;
        }
        return {deviations == 0, "500 instances, " + std::to_string(checked) + " misreports, " +
                                         std::to_string(deviations) + " profitable deviations (required 0)"};
    });

    criterion(5, "budget balance", [&]() -> Verdict {
        int imbalances = 0;
        int authority_violations = 0;
        for (const auto& e : sparcas_runs) {
            auto m = check_money(e);
            imbalances += m.step_imbalances;
            authority_violations += m.authority_violations;
            for (const auto& step : e.report.ledger) {
                imbalances += step.paid != step.credited + step.authority ? 1 : 0;
            }
        }
        return {imbalances == 0 && authority_violations == 0,
                std::to_string(sparcas_runs.size()) + " runs, " + std::to_string(imbalances) +
                        " unbalanced steps, " + std::to_string(authority_violations) +
                        " authority holdings with outside robots available (required 0 and 0)"};
    });

    criterion(6, "payment properties", [&]() -> Verdict {
        int negative_payments = 0;
        int negative_payoffs = 0;
        std::map<int, std::pair<double, int>> never;
        for (const auto& e : sparcas_runs) {
            auto m = check_money(e);
            negative_payments += m.negative_payments;
            negative_payoffs += m.negative_payoffs;
            auto& slot = never[e.config.robots];
            slot.first += m.robots > 0 ? static_cast<double>(m.never_paid) / m.robots : 1.0;
            slot.second += 1;
        }
        bool fraction_ok = true;
        std::string fractions;
        for (const auto& [n, acc] : never) {
            const double f = acc.first / acc.second;
            fractions += " n=" + std::to_string(n) + ":" + fmt(f);
            if (n <= 75) {
                fraction_ok = fraction_ok && f >= kMinNeverPaid;
            } else if (f < kMinNeverPaid) {
                fractions += "(reported)";
            }
        }
        return {negative_payments == 0 && negative_payoffs == 0 && fraction_ok,
                std::to_string(negative_payments) + " negative payments, " + std::to_string(negative_payoffs) +
                        " negative per-step payoffs; never-paid fraction" + fractions + " (n<=75 requires >= " +
                        fmt(kMinNeverPaid, 2) + ")"};
    });

    criterion(7, "class prioritization", [&]() -> Verdict {
        std::array<double, 3> wait{};
        std::array<double, 3> pay{};
        int seeds = 0;
        for (const auto& e : sparcas_runs) {
            if (e.config.robots != 100) {
                continue;
            }
            ++seeds;
            auto scenario = make_scenario(e.config);
            std::map<RobotId, RobotClass> cls;
            for (const auto& r : scenario.robots) {
                cls[r.id] = r.cls;
            }
            std::map<RobotId, int> steps;
            std::map<RobotId, int> advances;
            std::map<RobotId, Money> paid;
            for (const auto& s : parse_trace(e.trace).steps) {
                ++steps[s.robot];
                advances[s.robot] += s.action == Move::Advance ? 1 : 0;
                paid[s.robot] += s.payment;
            }
            std::array<double, 3> w{};
            std::array<double, 3> p{};
            std::array<int, 3> count{};
            for (const auto& [id, c] : cls) {
                const auto k = static_cast<size_t>(c);
                w[k] += steps[id] - advances[id];
                p[k] += to_double(paid[id]);
                ++count[k];
            }
            for (size_t k = 0; k < 3; ++k) {
                wait[k] += count[k] ? w[k] / count[k] : 0;
                pay[k] += count[k] ? p[k] / count[k] : 0;
            }
        }
        for (size_t k = 0; k < 3; ++k) {
            wait[k] /= seeds;
            pay[k] /= seeds;
        }
        const bool pass = seeds == 20 && wait[2] <= wait[1] && wait[1] <= wait[0] && pay[2] >= pay[1] &&
                          pay[1] >= pay[0];
        return {pass, std::to_string(seeds) + " seeds at n=100; mean wait e/r/p " + fmt(wait[0]) + "/" +
                              fmt(wait[1]) + "/" + fmt(wait[2]) + ", mean payment e/r/p " + fmt(pay[0], 4) + "/" +
                              fmt(pay[1], 4) + "/" + fmt(pay[2], 4)};
    });

    criterion(8, "near-optimality", [&]() -> Verdict {
        std::mt19937_64 rng(20240308);
        std::ofstream archive("acceptance-artifacts/near_optimality.csv");
        archive << "instance,width,robots,sparcas_sum_of_costs,optimal_sum_of_costs,ratio\n";
        double total = 0;
        double worst = 0;
        int below_one = 0;
        int unfinished = 0;
        for (int i = 0; i < 50; ++i) {
            auto inst = random_tiny_instance(rng);
            auto optimum = oracle::joint_optimal(*shared_grid(inst.params), inst.robots);
            auto report = simulate(tiny_scenario(inst, MechanismKind::Sparcas)).report;
            int sum = 0;
            for (const auto& r : report.per_robot) {
                unfinished += r.finished() ? 0 : 1;
                sum += r.finished_at;
            }
            const double ratio = optimum.sum_of_costs > 0 ? static_cast<double>(sum) / optimum.sum_of_costs : 1.0;
            below_one += sum < optimum.sum_of_costs ? 1 : 0;
            total += ratio;
            worst = std::max(worst, ratio);
            archive << i << ',' << inst.params.width << ',' << inst.robots.size() << ',' << sum << ','
                    << optimum.sum_of_costs << ',' << fmt(ratio, 6) << '\n';
        }
        const double mean = total / 50;
        return {mean <= kMaxMeanRatio && below_one == 0 && unfinished == 0,
                "50 instances, mean ratio " + fmt(mean, 4) + " (limit " + fmt(kMaxMeanRatio, 2) + "), max " +
                        fmt(worst, 4) + ", " + std::to_string(below_one) + " below 1, " +
                        std::to_string(unfinished) + " unfinished"};
    });

    criterion(9, "scalability shape", [&]() -> Verdict {
        const int seeds = 5;
        std::map<int, double> sparcas_time;
        std::map<int, double> baseline_time;
        std::map<int, int> sparcas_timeouts;
        std::map<int, int> baseline_timeouts;
        for (const auto& e : sparcas_runs) {
            const int n = e.config.robots;
            if ((n == 50 || n == 200) && e.config.seed <= static_cast<std::uint64_t>(seeds)) {
                sparcas_time[n] += (e.report.timed_out ? kTimeoutSeconds : e.report.planning_seconds()) / seeds;
                sparcas_timeouts[n] += e.report.timed_out ? 1 : 0;
            }
        }
        for (int n : {50, 200}) {
            for (int s = 1; s <= seeds; ++s) {
                auto e = execute(grid_config(n, static_cast<std::uint64_t>(s), MechanismKind::PrioritizedBaseline),
                        false);
                baseline_time[n] += (e.report.timed_out ? kTimeoutSeconds : e.report.planning_seconds()) / seeds;
                baseline_timeouts[n] += e.report.timed_out ? 1 : 0;
                if (!e.report.timed_out) {
                    replayable.push_back(std::move(e));
                }
            }
        }
        const double sparcas_growth = sparcas_time[200] / sparcas_time[50];
        const double baseline_growth = baseline_time[200] / baseline_time[50];
        bool timeouts_ok = true;
        for (int n : {50, 200}) {
            timeouts_ok = timeouts_ok && sparcas_timeouts[n] == 0;
        }
        return {sparcas_growth < baseline_growth && timeouts_ok,
                "planning time 50->200: sparcas " + fmt(sparcas_time[50]) + "s -> " + fmt(sparcas_time[200]) +
                        "s (x" + fmt(sparcas_growth, 2) + "), baseline " + fmt(baseline_time[50], 4) + "s -> " +
                        fmt(baseline_time[200], 4) + "s (x" + fmt(baseline_growth, 2) + "); timeouts sparcas " +
                        std::to_string(sparcas_timeouts[50] + sparcas_timeouts[200]) + ", baseline " +
                        std::to_string(baseline_timeouts[50] + baseline_timeouts[200])};
    });

    criterion(10, "determinism and replay", [&]() -> Verdict {
        int replayed = 0;
        int mismatched = 0;
        std::string first;
        auto check = [&](const Emitted& e) {
            auto result = replay_trace(e.trace, e.audit);
            ++replayed;
            if (!result.ok()) {
                ++mismatched;
                if (first.empty()) {
                    first = " first: line " + std::to_string(result.line) + " " + result.message;
                }
            }
        };
        for (const auto& e : sparcas_runs) {
            check(e);
        }
        for (const auto& e : replayable) {
            check(e);
        }
        return {mismatched == 0 && replayed > 0,
                std::to_string(replayed) + " traces replayed, " + std::to_string(mismatched) + " mismatches" + first};
    });

    std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures);
    return failures == 0 ? 0 : 1;
}
