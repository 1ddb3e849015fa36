#include "verify.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "experiment.hpp"
#include "sparcas/instances.hpp"
#include "sparcas/oracle.hpp"
#include "sparcas/trace.hpp"

namespace sparcas::cli {

namespace {

std::string describe(const AuctionInstance& inst, const AuctionOutcome& outcome) {
    AuctionRecord rec{0, 0, inst.announcements, inst.blocked, outcome};
    std::ostringstream out;
    out << "ring:";
    for (auto c : inst.ring.ring) {
        out << ' ' << c.index;
    }
    out << "\n" << format_audit_entry(rec) << "\n";
    return out.str();
}

struct Context {
    VerifyOptions options;
    AuctionHooks hooks;
    std::uint64_t seed;
};

CheckResult check_efficiency(const Context& ctx) {
    CheckResult res{"efficiency-equivalence"};
    const int count = ctx.options.full ? 10000 : 2000;
    std::mt19937_64 rng(ctx.seed + 1);
    for (int i = 0; i < count; ++i) {
        auto inst = random_auction_instance(rng, 1 + i % 6);
        auto mine = sparcas_auction(inst.ring, inst.announcements, inst.blocked, ctx.hooks);
        auto best = oracle::oracle_auction(inst.ring, inst.announcements, inst.blocked);
        if (mine.welfare != best.welfare || welfare(mine.chosen, inst.announcements) != best.welfare) {
            res.passed = false;
            res.detail = "instance " + std::to_string(i) + ": welfare " + to_exact_string(mine.welfare) +
                         " vs oracle " + to_exact_string(best.welfare);
            res.counterexample = "mechanism:\n" + describe(inst, mine) + "oracle:\n" + describe(inst, best);
            return res;
        }
    }
    res.detail = std::to_string(count) + " instances, welfare equal to the exhaustive maximum";
    return res;
}

CheckResult check_truthfulness(const Context& ctx) {
    CheckResult res{"truthfulness-sweep"};
    const int count = ctx.options.full ? 500 : 100;
    std::mt19937_64 rng(ctx.seed + 2);
    const AuctionHooks hooks = ctx.hooks;
    oracle::AuctionFn auction = [hooks](const Roundabout& r, std::span<const Announcement> a,
                                        std::span<const CellId> b) { return sparcas_auction(r, a, b, hooks); };
    size_t checked = 0;
    for (int i = 0; i < count; ++i) {
        auto inst = random_auction_instance(rng, 4);
        auto verdict = oracle::misreport_sweep(inst.ring, inst.announcements, inst.blocked, auction);
        checked += verdict.misreports_checked;
        if (!verdict.truthful()) {
            const auto& d = verdict.deviations.front();
            res.passed = false;
            res.detail = "instance " + std::to_string(i) + ": robot " + std::to_string(d.robot) + " with value " +
                         to_exact_string(d.true_value) + " gains by reporting " + to_exact_string(d.misreport) +
                         " (payoff " + to_exact_string(d.deviant_payoff) + " > " + to_exact_string(d.truthful_payoff) +
                         ")";
            res.counterexample = describe(inst, auction(inst.ring, inst.announcements, inst.blocked)) + res.detail + "\n";
            return res;
        }
    }
    res.detail = std::to_string(count) + " instances, " + std::to_string(checked) + " misreports, none profitable";
    return res;
}

CheckResult check_determinism(const Context& ctx) {
    CheckResult res{"determinism"};
    std::mt19937_64 rng(ctx.seed + 3);
    for (int i = 0; i < 300; ++i) {
        auto inst = random_auction_instance(rng, 1 + i % 6);
        auto a = sparcas_auction(inst.ring, inst.announcements, inst.blocked, ctx.hooks);
        auto b = sparcas_auction(inst.ring, inst.announcements, inst.blocked, ctx.hooks);
        if (!(a == b)) {
            res.passed = false;
            res.detail = "instance " + std::to_string(i) + " produced two different outcomes";
            res.counterexample = "first:\n" + describe(inst, a) + "second:\n" + describe(inst, b);
            return res;
        }
    }
    SimConfig config;
    config.robots = 50;
    config.seed = ctx.seed;
    std::string traces[2];
    for (auto& trace : traces) {
        auto scenario = make_scenario(config);
        scenario.options.hooks = ctx.hooks;
        trace = simulate(scenario).trace;
    }
    if (traces[0] != traces[1]) {
        res.passed = false;
        res.detail = "two runs of the same config produced different traces";
        res.counterexample = format_config(config) + "\n";
        return res;
    }
    res.detail = "300 auctions and one 50-robot run repeated identically";
    return res;
}

struct BatteryRun {
    SimConfig config;
    RunResult result;
    std::string failure;
};

std::vector<BatteryRun> simulation_battery(const Context& ctx) {
    std::vector<BatteryRun> runs;
    const std::vector<int> sizes = ctx.options.full ? std::vector<int>{10, 50, 100, 200} : std::vector<int>{50, 100};
    const int seeds = ctx.options.full ? 20 : 3;
    for (int n : sizes) {
        for (int s = 0; s < seeds; ++s) {
            BatteryRun br;
            br.config.robots = n;
            br.config.seed = ctx.seed + static_cast<std::uint64_t>(s);
            auto scenario = make_scenario(br.config);
            scenario.options.hooks = ctx.hooks;
            RunOptions options;
            options.capture_trace = false;
            options.capture_audit = false;
            try {
                br.result = simulate(scenario, options);
            } catch (const std::exception& e) {
                br.failure = e.what();
            }
            runs.push_back(std::move(br));
        }
    }
    return runs;
}

CheckResult check_collisions(const std::vector<BatteryRun>& runs) {
    CheckResult res{"collision-deadlock-runs"};
    for (const auto& r : runs) {
        const auto& rep = r.result.report;
        std::string problem = r.failure;
        if (problem.empty() && rep.deadlock) {
            problem = "deadlock";
        } else if (problem.empty() && rep.finished != rep.robots) {
            problem = "only " + std::to_string(rep.finished) + " of " + std::to_string(rep.robots) + " finished";
        } else if (problem.empty() && rep.max_ring_occupancy > 3) {
            problem = "ring occupancy " + std::to_string(rep.max_ring_occupancy);
        }
        if (!problem.empty()) {
            res.passed = false;
            res.detail = problem;
            res.counterexample = format_config(r.config) + "\n" + problem + "\n";
            return res;
        }
    }
    res.detail = std::to_string(runs.size()) + " runs, no collision, no deadlock, rings at most m-1";
    return res;
}

CheckResult check_budget(const std::vector<BatteryRun>& runs) {
    CheckResult res{"budget-balance"};
    for (const auto& r : runs) {
        for (const auto& step : r.result.report.ledger) {
            if (step.paid != step.credited + step.authority) {
                res.passed = false;
                res.detail = "t=" + std::to_string(step.t) + ": paid " + to_exact_string(step.paid) + " != credited " +
                             to_exact_string(step.credited) + " + authority " + to_exact_string(step.authority);
                res.counterexample = format_config(r.config) + "\n" + res.detail + "\n";
                return res;
            }
        }
    }
    res.detail = "every step of " + std::to_string(runs.size()) + " runs reconciles exactly";
    return res;
}

CheckResult check_payment_signs(const std::vector<BatteryRun>& runs) {
    CheckResult res{"payment-signs"};
    for (const auto& r : runs) {
        const auto& rep = r.result.report;
        if (rep.negative_payments > 0 || rep.negative_payoffs > 0) {
            res.passed = false;
            res.detail = std::to_string(rep.negative_payments) + " negative payments, " +
                         std::to_string(rep.negative_payoffs) + " negative payoffs";
            res.counterexample = format_config(r.config) + "\n";
            for (const auto& a : rep.anomalies) {
                res.counterexample += a + "\n";
            }
            return res;
        }
    }
    res.detail = "all payments and truthful per-step payoffs are >= 0";
    return res;
}

CheckResult check_fixture() {
    CheckResult res{"deadlock-fixture"};
    auto naive = simulate(four_robot_fixture(MechanismKind::Naive)).report;
    auto sparcas = simulate(four_robot_fixture(MechanismKind::Sparcas)).report;
    if (!naive.deadlock || sparcas.deadlock || sparcas.finished != 4 || sparcas.max_ring_occupancy > 3) {
        res.passed = false;
        res.detail = "naive deadlock=" + std::to_string(naive.deadlock) + ", sparcas finished " +
                     std::to_string(sparcas.finished) + "/4 with ring occupancy " +
                     std::to_string(sparcas.max_ring_occupancy);
        res.counterexample = res.detail + "\n";
        return res;
    }
    res.detail = "naive deadlocks at t=" + std::to_string(naive.steps) + ", sparcas finishes in " +
                 std::to_string(sparcas.makespan) + " steps";
    return res;
}

CheckResult check_replay(const Context& ctx) {
    CheckResult res{"trace-replay"};
    for (auto mech : {MechanismKind::Sparcas, MechanismKind::Naive, MechanismKind::PrioritizedBaseline}) {
        SimConfig config;
        config.robots = 40;
        config.seed = ctx.seed;
        config.mechanism = mech;
        auto result = run(config);
        auto replay = replay_trace(result.trace, result.audit);
        if (!replay.ok()) {
            res.passed = false;
            res.detail = std::string(to_string(mech)) + ": " + replay.message;
            res.counterexample = res.detail + "\nexpected: " + replay.expected + "\nactual:   " + replay.actual + "\n";
            return res;
        }
    }
    res.detail = "sparcas, naive and baseline traces replay byte-identically";
    return res;
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& options, std::ostream& log) {
    Context ctx{options, {}, seed_base()};
    if (options.mutate == "tie-break") {
        ctx.hooks.unseeded_tie_break = true;
    } else if (options.mutate == "payment-sign") {
        ctx.hooks.flip_payment_sign = true;
    } else if (!options.mutate.empty()) {
        throw std::invalid_argument("unknown mutation '" + options.mutate + "' (tie-break, payment-sign)");
    }

    std::vector<std::function<CheckResult()>> checks{
            [&] { return check_efficiency(ctx); },
            [&] { return check_truthfulness(ctx); },
            [&] { return check_determinism(ctx); },
    };
    std::vector<CheckResult> results;
    for (auto& check : checks) {
        results.push_back(check());
        log << (results.back().passed ? "PASS  " : "FAIL  ") << results.back().name << "  " << results.back().detail
            << std::endl;
    }
    const auto battery = simulation_battery(ctx);
    for (auto result : {check_collisions(battery), check_budget(battery), check_payment_signs(battery),
                 check_fixture(), check_replay(ctx)}) {
        log << (result.passed ? "PASS  " : "FAIL  ") << result.name << "  " << result.detail << std::endl;
        results.push_back(std::move(result));
    }
    for (const auto& r : results) {
        if (!r.passed && !r.counterexample.empty()) {
            std::filesystem::create_directories(options.output);
            auto path = options.output / ("counterexample-" + r.name + ".txt");
            std::ofstream(path) << r.counterexample;
            log << "counterexample written to " << path.string() << std::endl;
        }
    }
    return results;
}

}  // namespace sparcas::cli
