#include "sparcas/simulator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sparcas/trace.hpp"

namespace sparcas {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kNobody = -1;

Occupancy occupancy_of(const std::vector<RobotState>& robots) {
    Occupancy occ;
    for (const auto& r : robots) {
        if (r.stage == Stage::Active) {
            occ.emplace(r.spec.id, r.position());
        }
    }
    return occ;
}

}  // namespace

CollisionReport detect_collision(const Occupancy& before, const Occupancy& after) {
    CollisionReport report;
    std::set<RobotId> offenders;
    auto flag = [&](RobotId a, RobotId b, std::string detail) {
        offenders.insert(a);
        offenders.insert(b);
        report.details.push_back(std::move(detail));
    };

    std::map<CellId, RobotId> holder_after;
    for (const auto& [id, cell] : after) {
        auto [it, inserted] = holder_after.emplace(cell, id);
        if (!inserted) {
            flag(it->second, id,
                    "robots " + std::to_string(it->second) + " and " + std::to_string(id) + " share cell " +
                            std::to_string(cell.index));
        }
    }

    std::map<CellId, RobotId> holder_before;
    for (const auto& [id, cell] : before) {
        holder_before.emplace(cell, id);
    }
    for (const auto& [id, to] : after) {
        auto from_it = before.find(id);
        if (from_it == before.end() || from_it->second == to) {
            continue;
        }
        const CellId from = from_it->second;
        auto prev = holder_before.find(to);
        if (prev == holder_before.end() || prev->second == id) {
            continue;
        }
        const RobotId other = prev->second;
        auto other_after = after.find(other);
        if (other_after == after.end()) {
            continue;
        }
        if (other_after->second == to) {
            flag(id, other,
                    "robot " + std::to_string(id) + " moved into cell " + std::to_string(to.index) +
                            " held by stopped robot " + std::to_string(other));
        } else if (other_after->second == from && id < other) {
            flag(id, other,
                    "robots " + std::to_string(id) + " and " + std::to_string(other) + " swapped cells " +
                            std::to_string(from.index) + " and " + std::to_string(to.index));
        }
    }
    report.offenders.assign(offenders.begin(), offenders.end());
    return report;
}

bool detect_deadlock(std::span<const StepActivity> history, int window) {
    if (window < 1) {
        throw std::invalid_argument("deadlock window must be at least 1");
    }
    if (history.size() < static_cast<size_t>(window)) {
        return false;
    }
    return std::all_of(history.end() - window, history.end(),
            [](const StepActivity& s) { return s.on_road > 0 && s.advances == 0; });
}

double SimReport::planning_seconds() const {
    if (mechanism == MechanismKind::PrioritizedBaseline) {
        return baseline_planning_seconds;
    }
    return offline_seconds + auction_seconds;
}

Simulation::Simulation(Scenario scenario, RunOptions options)
        : _scenario(std::move(scenario))
        , _options(std::move(options)) {
    if (!_scenario.workspace) {
        throw std::invalid_argument("scenario has no workspace");
    }
    const auto& opts = _scenario.options;
    if (opts.deadlock_window < 1 || opts.step_limit < 0) {
        throw std::invalid_argument("deadlock window must be >= 1 and step limit >= 0");
    }
    std::set<RobotId> ids;
    for (const auto& spec : _scenario.robots) {
        if (!ids.insert(spec.id).second) {
            throw std::invalid_argument("duplicate robot id " + std::to_string(spec.id));
        }
        if (spec.path.cells.empty()) {
            throw std::invalid_argument("robot " + std::to_string(spec.id) + " has an empty path");
        }
        if (spec.arrival_time < 0) {
            throw std::invalid_argument("robot " + std::to_string(spec.id) + " has a negative arrival time");
        }
        RobotState state;
        state.spec = spec;
        _robots.push_back(std::move(state));
    }
    std::sort(_robots.begin(), _robots.end(),
            [](const RobotState& a, const RobotState& b) { return a.spec.id < b.spec.id; });

    if (_options.capture_trace) {
        _trace = "# sparcas-trace v1\n";
        if (_scenario.config) {
            _trace += format_config(*_scenario.config) + "\n";
        }
    }

    if (opts.mechanism == MechanismKind::PrioritizedBaseline) {
        // Priority = (arrival time, id). Each robot is planned against all
        // earlier reservations; unplannable robots never enter.
        std::vector<size_t> order(_robots.size());
        for (size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return _robots[a].spec.arrival_time < _robots[b].spec.arrival_time;
        });
        _plans.resize(_robots.size());
        Reservation reservation;
        const int horizon = default_horizon(workspace());
        const auto started = Clock::now();
        for (size_t i : order) {
            if (_options.deadline && Clock::now() > *_options.deadline) {
                _timed_out = true;
                break;
            }
            const auto& spec = _robots[i].spec;
            auto plan = plan_space_time(workspace(), reservation, spec.path.cells.front(), spec.path.cells.back(),
                    spec.arrival_time, horizon);
            if (plan) {
                reservation.reserve_path(*plan, spec.id);
                // The robot follows the planned cells; waits are replayed from
                // the schedule.
                Path walked;
                for (auto c : plan->cells) {
                    if (walked.cells.empty() || walked.cells.back() != c) {
                        walked.cells.push_back(c);
                    }
                }
                _robots[i].spec.path = std::move(walked);
            }
            _plans[i] = std::move(plan);
        }
        _baseline_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    }

    if (_options.capture_motion) {
        _motion.push_back({});
    }
    inject_and_retire(0);
    if (_options.capture_motion) {
        _motion.back() = occupancy();
    }
    record_ring_occupancy();
}

Occupancy Simulation::occupancy() const {
    return occupancy_of(_robots);
}

bool Simulation::finished() const {
    if (_deadlock || _step_limit || _timed_out) {
        return true;
    }
    return std::all_of(_robots.begin(), _robots.end(), [&](const RobotState& r) {
        if (r.stage == Stage::Done) {
            return true;
        }
        // Robots the baseline could not plan never enter.
        return r.stage == Stage::Pending && !_plans.empty() && !_plans[static_cast<size_t>(&r - _robots.data())];
    });
}

void Simulation::inject_and_retire(int t) {
    const bool baseline = _scenario.options.mechanism == MechanismKind::PrioritizedBaseline;
    std::set<CellId> held;
    for (const auto& r : _robots) {
        if (r.stage == Stage::Active) {
            held.insert(r.position());
        }
    }
    for (size_t i = 0; i < _robots.size(); ++i) {
        auto& r = _robots[i];
        if (r.stage != Stage::Pending) {
            continue;
        }
        if (baseline) {
            if (!_plans[i] || _plans[i]->start_time != t) {
                continue;
            }
        } else if (r.spec.arrival_time > t) {
            continue;
        }
        const CellId start = r.spec.path.cells.front();
        if (held.contains(start)) {
            continue;
        }
        held.insert(start);
        r.stage = Stage::Active;
        r.injected_at = t;
        r.path_index = 0;
    }
    for (auto& r : _robots) {
        if (r.stage == Stage::Active && r.at_goal()) {
            r.stage = Stage::Done;
            r.finished_at = t;
        }
    }
}

void Simulation::record_ring_occupancy() {
    const auto& w = workspace();
    std::vector<int> per_ring(w.intersections().size(), 0);
    for (const auto& r : _robots) {
        if (r.stage != Stage::Active) {
            continue;
        }
        const auto& cell = w.cell(r.position());
        if (cell.kind == CellKind::RingSlot) {
            ++per_ring[static_cast<size_t>(cell.intersection)];
        }
    }
    for (size_t k = 0; k < per_ring.size(); ++k) {
        _max_ring = std::max(_max_ring, per_ring[k]);
        if (_scenario.options.mechanism == MechanismKind::Sparcas &&
                per_ring[k] > w.intersections()[k].capacity() - 1) {
            _anomalies.push_back("t=" + std::to_string(_now) + ": roundabout " + std::to_string(k) + " holds " +
                                 std::to_string(per_ring[k]) + " robots");
        }
    }
}

void Simulation::append_trace_step(int t, const std::vector<size_t>& active, const std::vector<Move>& moves,
        const std::vector<Money>& values, const std::vector<Money>& payments, const std::vector<Money>& credits,
        const Money& authority) {
    if (!_options.capture_trace) {
        return;
    }
    for (size_t a = 0; a < active.size(); ++a) {
        const auto& r = _robots[active[a]];
        TraceStep rec;
        rec.t = t;
        rec.robot = r.spec.id;
        rec.pos = r.position();
        rec.action = moves[a];
        rec.value = moves[a] == Move::Advance ? values[a] : Money(0);
        rec.payment = payments[a];
        rec.credit = credits[a];
        _trace += format_trace_step(rec);
        _trace += '\n';
        ++_trace_records;
    }
    if (authority != 0) {
        _trace += format_trace_authority(t, authority);
        _trace += '\n';
        ++_trace_records;
    }
}

void Simulation::step() {
    if (finished()) {
        return;
    }
    if (_options.deadline && Clock::now() > *_options.deadline) {
        _timed_out = true;
        return;
    }
    const int t = _now;
    const auto& w = workspace();
    const auto& opts = _scenario.options;
    const bool baseline = opts.mechanism == MechanismKind::PrioritizedBaseline;

    std::vector<size_t> active;
    std::vector<int> slot_of(_robots.size(), kNobody);
    std::vector<int> occupant(static_cast<size_t>(w.cell_count()), kNobody);
    for (size_t i = 0; i < _robots.size(); ++i) {
        if (_robots[i].stage == Stage::Active) {
            slot_of[i] = static_cast<int>(active.size());
            occupant[static_cast<size_t>(_robots[i].position().index)] = static_cast<int>(active.size());
            active.push_back(i);
        }
    }
    const size_t n = active.size();
    std::vector<Move> moves(n, Move::Stay);
    std::vector<Money> values(n);
    std::vector<Money> payments(n);
    std::vector<Money> credits(n);
    std::vector<CellId> next(n);
    std::map<int, std::vector<size_t>> groups;
    std::vector<size_t> lane_robots;

    for (size_t a = 0; a < n; ++a) {
        const auto& r = _robots[active[a]];
        next[a] = r.spec.path.cells[r.path_index + 1];
        values[a] = Money(r.wait_time(t) + 1) * r.spec.weight;
        if (baseline) {
            continue;
        }
        auto k = w.intersection_of(r.position());
        if (!k) {
            k = w.intersection_of(next[a]);
        }
        if (k) {
            groups[*k].push_back(a);
        } else {
            lane_robots.push_back(a);
        }
    }

    std::map<int, Money> collected;
    std::map<int, std::vector<RobotId>> participants;
    Money naive_collected = 0;

    if (baseline) {
        for (size_t a = 0; a < n; ++a) {
            const auto& plan = *_plans[active[a]];
            moves[a] = plan.at(t + 1) != plan.at(t) ? Move::Advance : Move::Stay;
        }
    } else {
        for (size_t a : lane_robots) {
            moves[a] = occupant[static_cast<size_t>(next[a].index)] == kNobody ? Move::Advance : Move::Stay;
        }
    }

    for (const auto& [k, members] : groups) {
        std::vector<Announcement> anns;
        for (size_t a : members) {
            const auto& r = _robots[active[a]];
            anns.push_back({r.spec.id, r.position(), next[a], values[a]});
            ++_robots[active[a]].auctions;
        }
        if (opts.mechanism == MechanismKind::Naive) {
            for (size_t m = 0; m < members.size(); ++m) {
                const size_t a = members[m];
                std::vector<Announcement> others;
                for (size_t o = 0; o < members.size(); ++o) {
                    if (o != m && anns[o].next == anns[m].next) {
                        others.push_back(anns[o]);
                    }
                }
                const int holder = occupant[static_cast<size_t>(next[a].index)];
                if (holder != kNobody) {
                    const auto& h = _robots[active[static_cast<size_t>(holder)]];
                    others.push_back({h.spec.id, h.position(), next[static_cast<size_t>(holder)], values[holder]});
                }
                auto result = naive_step(anns[m], others);
                moves[a] = result.decision == Decision::Go ? Move::Advance : Move::Stay;
                payments[a] = result.payment;
                naive_collected += result.payment;
            }
            continue;
        }

        std::vector<CellId> blocked;
        std::set<size_t> in_group(members.begin(), members.end());
        for (size_t a : members) {
            const int holder = occupant[static_cast<size_t>(next[a].index)];
            if (holder != kNobody && !in_group.contains(static_cast<size_t>(holder))) {
                blocked.push_back(next[a]);
            }
        }
        std::sort(blocked.begin(), blocked.end());
        blocked.erase(std::unique(blocked.begin(), blocked.end()), blocked.end());

        const auto& ring = w.intersection(k);
        AuctionOutcome outcome = opts.placement == AuctionPlacement::Decentralized
                                         ? decentralized_auction(ring, anns, blocked)
                                         : sparcas_auction(ring, anns, blocked, opts.hooks);
        ++_auctions;
        Money total = 0;
        for (size_t m = 0; m < members.size(); ++m) {
            const size_t a = members[m];
            const RobotId id = anns[m].robot;
            moves[a] = outcome.chosen.at(id);
            payments[a] = outcome.payments.at(id);
            total += payments[a];
            participants[k].push_back(id);
            const Money gained = moves[a] == Move::Advance ? values[a] : Money(0);
            if (payments[a] < 0) {
                ++_negative_payments;
                _anomalies.push_back("t=" + std::to_string(t) + ": robot " + std::to_string(id) +
                                     " has negative payment " + to_exact_string(payments[a]));
            }
            if (gained - payments[a] < 0) {
                ++_negative_payoffs;
                _anomalies.push_back("t=" + std::to_string(t) + ": robot " + std::to_string(id) +
                                     " has negative payoff " + to_exact_string(gained - payments[a]));
            }
        }
        collected[k] = total;
        if (_options.capture_audit) {
            _audit.emplace_back(AuctionRecord{t, k, std::move(anns), std::move(blocked), std::move(outcome)});
        }
    }

    // Redistribution among robots present at t.
    Money step_authority = naive_collected;
    Money step_paid = naive_collected;
    Money step_credited = 0;
    std::vector<RobotId> present;
    for (size_t i : active) {
        present.push_back(_robots[i].spec.id);
    }
    std::map<int, Money> distributable;
    for (const auto& [k, total] : collected) {
        step_paid += total;
        if (total < 0) {
            step_authority += total;
        } else {
            distributable.emplace(k, total);
        }
    }
    for (const auto& transfer : redistribute(distributable, participants, present)) {
        if (transfer.payee.is_authority()) {
            step_authority += transfer.amount;
        } else {
            auto it = std::lower_bound(present.begin(), present.end(), *transfer.payee.robot);
            const size_t a = static_cast<size_t>(it - present.begin());
            credits[a] += transfer.amount;
            _robots[active[a]].credited += transfer.amount;
            step_credited += transfer.amount;
        }
        if (_options.capture_audit) {
            _audit.emplace_back(TransferRecord{t, transfer});
        }
    }
    if (_options.capture_audit) {
        for (const auto& [k, total] : collected) {
            if (total < 0) {
                _audit.emplace_back(TransferRecord{t, {k, Party::authority(), Party::authority(), total}});
            }
        }
    }
    _authority += step_authority;
    if (step_paid != 0 || step_credited != 0 || step_authority != 0) {
        _ledger.push_back({t, step_paid, step_credited, step_authority});
    }

    append_trace_step(t, active, moves, values, payments, credits, step_authority);

    // Apply every move at once.
    const Occupancy before = occupancy();
    int advanced = 0;
    for (size_t a = 0; a < n; ++a) {
        auto& r = _robots[active[a]];
        if (moves[a] == Move::Advance) {
            ++r.path_index;
            ++r.advances;
            r.value_received += values[a];
            ++advanced;
        }
        r.paid += payments[a];
    }

    const Occupancy after = occupancy();
    auto collision = detect_collision(before, after);
    if (collision.collided()) {
        std::string message = "collision at t=" + std::to_string(t) + ":";
        for (const auto& d : collision.details) {
            message += " " + d + ";";
        }
        throw CollisionError(message, _trace);
    }

    _now = t + 1;
    inject_and_retire(_now);
    record_ring_occupancy();
    if (_options.capture_motion) {
        _motion.push_back(occupancy());
    }
    _activity.push_back({advanced, static_cast<int>(n)});
    // Baseline schedules are conflict-free and finite; planned waits are not
    // deadlocks.
    if (!baseline && detect_deadlock(_activity, opts.deadlock_window)) {
        _deadlock = true;
    }
    const bool all_done = std::all_of(_robots.begin(), _robots.end(), [](const RobotState& r) {
        return r.stage == Stage::Done;
    });
    if (!all_done && _now >= opts.step_limit && !finished()) {
        _step_limit = true;
    }
}

RunResult Simulation::finish() {
    RunResult result;
    auto& rep = result.report;
    const auto& opts = _scenario.options;
    rep.mechanism = opts.mechanism;
    rep.robots = static_cast<int>(_robots.size());
    rep.steps = _now;
    rep.deadlock = _deadlock;
    rep.step_limit_reached = _step_limit;
    rep.timed_out = _timed_out;
    rep.max_ring_occupancy = _max_ring;
    rep.auctions = _auctions;
    rep.negative_payments = _negative_payments;
    rep.negative_payoffs = _negative_payoffs;
    rep.authority_holdings = _authority;
    rep.ledger = _ledger;
    rep.anomalies = _anomalies;
    rep.baseline_planning_seconds = _baseline_seconds;

    int latest = 0;
    int never_paid = 0;
    double exec_sum = 0;
    std::map<RobotClass, std::array<double, 3>> sums;
    for (size_t i = 0; i < _robots.size(); ++i) {
        const auto& r = _robots[i];
        RobotReport out;
        out.id = r.spec.id;
        out.cls = r.spec.cls;
        out.arrival_time = r.spec.arrival_time;
        out.injected_at = r.injected_at;
        out.finished_at = r.finished_at;
        out.path_length = static_cast<int>(r.spec.path.cells.size());
        out.auctions = r.auctions;
        out.value = r.value_received;
        out.paid = r.paid;
        out.credited = r.credited;
        if (r.injected_at >= 0) {
            const int end = r.finished_at >= 0 ? r.finished_at : _now;
            out.execution_time = end - r.injected_at;
            out.wait_time = r.wait_time(end);
        }
        if (r.finished_at >= 0) {
            ++rep.finished;
            latest = std::max(latest, r.finished_at);
            exec_sum += out.execution_time;
        }
        if (r.paid == 0) {
            ++never_paid;
        }
        if (opts.mechanism == MechanismKind::PrioritizedBaseline && !_plans[i]) {
            ++rep.baseline_failures;
        }
        rep.total_paid += r.paid;
        rep.total_credited += r.credited;
        auto& s = sums[r.spec.cls];
        s[0] += out.wait_time;
        s[1] += to_double(r.paid);
        s[2] += to_double(r.value_received);
        ++rep.per_class[r.spec.cls].robots;
        rep.offline_seconds = std::max(rep.offline_seconds, r.spec.planning_seconds);
        rep.per_robot.push_back(std::move(out));
    }
    for (auto& [cls, summary] : rep.per_class) {
        const auto& s = sums[cls];
        summary.mean_wait = s[0] / summary.robots;
        summary.mean_payment = s[1] / summary.robots;
        summary.mean_value = s[2] / summary.robots;
    }
    rep.makespan = rep.finished == rep.robots ? latest : _now;
    rep.mean_execution_time = rep.finished > 0 ? exec_sum / rep.finished : 0;
    rep.fraction_never_paid = rep.robots > 0 ? static_cast<double>(never_paid) / rep.robots : 1.0;
    if (opts.mechanism == MechanismKind::PrioritizedBaseline) {
        rep.offline_seconds = 0;
    } else {
        rep.auction_seconds = rep.makespan * opts.mini_slot_ms / 1000.0;
    }

    if (_options.capture_trace) {
        result.trace = _trace + "end steps=" + std::to_string(_now) + " records=" + std::to_string(_trace_records) +
                       "\n";
    }
    if (_options.capture_audit) {
        result.audit = format_audit_log(_audit);
    }
    result.motion = std::move(_motion);
    return result;
}

RunResult simulate(const Scenario& scenario, const RunOptions& options) {
    Simulation sim(scenario, options);
    while (!sim.finished()) {
        sim.step();
    }
    return sim.finish();
}

RunResult run(const SimConfig& config, const RunOptions& options) {
    return simulate(make_scenario(config), options);
}

}  // namespace sparcas
