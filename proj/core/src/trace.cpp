#include "sparcas/trace.hpp"

#include <map>

#include "text_fields.hpp"

namespace sparcas {

namespace {

const char* placement_name(AuctionPlacement p) {
    return p == AuctionPlacement::Decentralized ? "decentralized" : "manager";
}

// First line where the two texts differ (1-based), or 0 when identical.
int first_difference(std::string_view a, std::string_view b, std::string& line_a, std::string& line_b) {
    auto la = detail::split_lines(a);
    auto lb = detail::split_lines(b);
    const size_t n = std::max(la.size(), lb.size());
    for (size_t i = 0; i < n; ++i) {
        std::string_view x = i < la.size() ? la[i] : std::string_view("<missing>");
        std::string_view y = i < lb.size() ? lb[i] : std::string_view("<missing>");
        if (x != y) {
            line_a = std::string(x);
            line_b = std::string(y);
            return static_cast<int>(i) + 1;
        }
    }
    return a == b ? 0 : static_cast<int>(n) + 1;
}

}  // namespace

std::string format_config(const SimConfig& c) {
    std::string out = "config";
    out += " width=" + std::to_string(c.workspace.width);
    out += " height=" + std::to_string(c.workspace.height);
    out += " spacing=" + std::to_string(c.workspace.block_spacing);
    out += " robots=" + std::to_string(c.robots);
    out += " mix=" + std::to_string(c.class_mix[0]) + ":" + std::to_string(c.class_mix[1]) + ":" +
           std::to_string(c.class_mix[2]);
    out += " late_percent=" + std::to_string(c.late_percent);
    out += " arrival_window=" + std::to_string(c.arrival_window);
    out += std::string(" mechanism=") + to_string(c.mechanism);
    out += std::string(" placement=") + placement_name(c.placement);
    out += " seed=" + std::to_string(c.seed);
    out += " step_limit=" + std::to_string(c.step_limit);
    out += " deadlock_window=" + std::to_string(c.deadlock_window);
    out += " mini_slot_ms=" + std::to_string(c.mini_slot_ms);
    return out;
}

SimConfig parse_config(std::string_view line, int line_no) {
    detail::FieldLine f(line, line_no);
    if (f.kind() != "config") {
        throw ParseError(line_no, "kind", "expected a config record");
    }
    SimConfig c;
    auto as_int = [&](const char* key) { return static_cast<int>(f.get_int(key)); };
    c.workspace.width = as_int("width");
    c.workspace.height = as_int("height");
    c.workspace.block_spacing = as_int("spacing");
    c.robots = as_int("robots");
    auto mix = detail::split(f.get("mix"), ':');
    if (mix.size() != 3) {
        throw ParseError(line_no, "mix", "expected economy:regular:premium");
    }
    for (size_t i = 0; i < 3; ++i) {
        c.class_mix[i] = static_cast<int>(detail::to_int(mix[i], line_no, "mix"));
    }
    c.late_percent = as_int("late_percent");
    c.arrival_window = as_int("arrival_window");
    try {
        c.mechanism = parse_mechanism(f.get("mechanism"));
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, "mechanism", e.what());
    }
    auto placement = f.get("placement");
    if (placement == "manager") {
        c.placement = AuctionPlacement::IntersectionManager;
    } else if (placement == "decentralized") {
        c.placement = AuctionPlacement::Decentralized;
    } else {
        throw ParseError(line_no, "placement", "expected manager or decentralized");
    }
    const auto seed = f.get("seed");
    auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), c.seed);
    if (ec != std::errc() || ptr != seed.data() + seed.size()) {
        throw ParseError(line_no, "seed", "expected an unsigned integer");
    }
    c.step_limit = as_int("step_limit");
    c.deadlock_window = as_int("deadlock_window");
    c.mini_slot_ms = as_int("mini_slot_ms");
    return c;
}

std::string format_trace_step(const TraceStep& s) {
    return "step t=" + std::to_string(s.t) + " robot=" + std::to_string(s.robot) + " pos=" +
           std::to_string(s.pos.index) + " action=" + (s.action == Move::Advance ? "advance" : "stay") +
           " value=" + to_exact_string(s.value) + " payment=" + to_exact_string(s.payment) +
           " credit=" + to_exact_string(s.credit);
}

std::string format_trace_authority(int t, const Money& amount) {
    return "authority t=" + std::to_string(t) + " amount=" + to_exact_string(amount);
}

Trace parse_trace(std::string_view text) {
    Trace trace;
    int line_no = 0;
    bool ended = false;
    bool saw_header = false;
    long long records = 0;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (line == "# sparcas-trace v1") {
                saw_header = true;
            }
            continue;
        }
        if (!saw_header) {
            throw ParseError(line_no, "header", "missing '# sparcas-trace v1' header");
        }
        if (ended) {
            throw ParseError(line_no, "end", "content after the end record");
        }
        detail::FieldLine f(line, line_no);
        if (f.kind() == "config") {
            if (trace.config || records > 0) {
                throw ParseError(line_no, "config", "config must appear once, before any record");
            }
            trace.config = parse_config(line, line_no);
        } else if (f.kind() == "step") {
            TraceStep s;
            s.t = static_cast<int>(f.get_int("t"));
            s.robot = static_cast<RobotId>(f.get_int("robot"));
            s.pos = CellId{static_cast<std::int32_t>(f.get_int("pos"))};
            auto action = f.get("action");
            if (action != "advance" && action != "stay") {
                throw ParseError(line_no, "action", "expected advance or stay");
            }
            s.action = action == "advance" ? Move::Advance : Move::Stay;
            s.value = f.get_money("value");
            s.payment = f.get_money("payment");
            s.credit = f.get_money("credit");
            trace.steps.push_back(std::move(s));
            ++records;
        } else if (f.kind() == "authority") {
            trace.authority.push_back({static_cast<int>(f.get_int("t")), f.get_money("amount")});
            ++records;
        } else if (f.kind() == "end") {
            trace.end_steps = static_cast<int>(f.get_int("steps"));
            if (f.get_int("records") != records) {
                throw ParseError(line_no, "records",
                        "end record says " + std::string(f.get("records")) + " but found " + std::to_string(records));
            }
            ended = true;
        } else {
            throw ParseError(line_no, "kind", "unknown record '" + std::string(f.kind()) + "'");
        }
    }
    if (!ended) {
        throw ParseError(line_no + 1, "end", "missing end record (truncated trace?)");
    }
    return trace;
}

Reconciliation reconcile(const Trace& trace) {
    std::map<int, Money> balance;
    for (const auto& s : trace.steps) {
        balance[s.t] += s.payment - s.credit;
    }
    for (const auto& a : trace.authority) {
        balance[a.t] -= a.amount;
    }
    for (const auto& [t, residue] : balance) {
        if (residue != 0) {
            return {false, t,
                    "step " + std::to_string(t) + ": payments - credits - authority = " + to_exact_string(residue)};
        }
    }
    return {};
}

ReplayResult replay_trace(std::string_view trace_text, std::optional<std::string_view> audit) {
    ReplayResult result;
    Trace trace;
    try {
        trace = parse_trace(trace_text);
    } catch (const ParseError& e) {
        result.status = ReplayResult::Status::ParseFailure;
        result.line = e.line();
        result.message = e.what();
        return result;
    }
    auto rec = reconcile(trace);
    if (!rec.ok) {
        result.status = ReplayResult::Status::ReconciliationFailure;
        result.message = "reconciliation failure at " + rec.message;
        return result;
    }
    if (!trace.config) {
        result.status = ReplayResult::Status::NotReplayable;
        result.message = "trace has no config record";
        return result;
    }
    RunOptions options;
    options.capture_audit = audit.has_value();
    RunResult rerun;
    try {
        rerun = run(*trace.config, options);
    } catch (const CollisionError& e) {
        rerun.trace = e.trace();
    }
    if (int line = first_difference(trace_text, rerun.trace, result.expected, result.actual)) {
        result.status = ReplayResult::Status::Divergence;
        result.line = line;
        result.message = "trace differs from the re-executed run at line " + std::to_string(line);
        return result;
    }
    if (audit) {
        if (int line = first_difference(*audit, rerun.audit, result.expected, result.actual)) {
            result.status = ReplayResult::Status::Divergence;
            result.line = line;
            result.message = "audit log differs from the re-executed run at line " + std::to_string(line);
            return result;
        }
    }
    return result;
}

}  // namespace sparcas
