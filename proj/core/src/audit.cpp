#include "sparcas/audit.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "text_fields.hpp"

namespace sparcas {

namespace {

std::string join_announcements(const std::vector<Announcement>& anns) {
    std::string out;
    for (const auto& a : anns) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::to_string(a.robot) + ':' + std::to_string(a.current.index) + ':' + std::to_string(a.next.index) +
               ':' + to_exact_string(a.reported_value);
    }
    return out.empty() ? "-" : out;
}

}  // namespace

std::string format_audit_entry(const AuditEntry& entry) {
    std::ostringstream out;
    if (const auto* a = std::get_if<AuctionRecord>(&entry)) {
        out << "auction t=" << a->t << " k=" << a->intersection << " ann=" << join_announcements(a->announcements)
            << " blocked=";
        if (a->blocked.empty()) {
            out << '-';
        }
        for (size_t i = 0; i < a->blocked.size(); ++i) {
            out << (i ? "," : "") << a->blocked[i].index;
        }
        out << " chosen=";
        bool first = true;
        for (const auto& [id, move] : a->outcome.chosen.moves) {
            out << (first ? "" : ",") << id << ':' << (move == Move::Advance ? 'A' : 'S');
            first = false;
        }
        out << " pay=";
        first = true;
        for (const auto& [id, amount] : a->outcome.payments) {
            out << (first ? "" : ",") << id << ':' << to_exact_string(amount);
            first = false;
        }
    } else {
        const auto& t = std::get<TransferRecord>(entry);
        out << "transfer t=" << t.t << " k=" << t.transfer.intersection << " payee=";
        if (t.transfer.payee.is_authority()) {
            out << "authority";
        } else {
            out << *t.transfer.payee.robot;
        }
        out << " amount=" << to_exact_string(t.transfer.amount);
    }
    return out.str();
}

std::string format_audit_log(const std::vector<AuditEntry>& entries) {
    std::string out = "# sparcas-audit v1\n";
    for (const auto& e : entries) {
        out += format_audit_entry(e);
        out += '\n';
    }
    out += "end records=" + std::to_string(entries.size()) + "\n";
    return out;
}

std::vector<AuditEntry> parse_audit_log(std::string_view text) {
    std::vector<AuditEntry> entries;
    int line_no = 0;
    bool ended = false;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (ended) {
            throw ParseError(line_no, "end", "content after the end record");
        }
        detail::FieldLine fields(line, line_no);
        if (fields.kind() == "end") {
            auto records = fields.get_int("records");
            if (records != static_cast<long long>(entries.size())) {
                throw ParseError(line_no, "records", "end record says " + std::to_string(records) + " but found " +
                                                             std::to_string(entries.size()));
            }
            ended = true;
            continue;
        }
        if (fields.kind() == "auction") {
            AuctionRecord rec;
            rec.t = static_cast<int>(fields.get_int("t"));
            rec.intersection = static_cast<int>(fields.get_int("k"));
            for (auto item : detail::split_list(fields.get("ann"))) {
                auto parts = detail::split(item, ':');
                if (parts.size() != 4) {
                    throw ParseError(line_no, "ann", "expected id:current:next:value, got '" + std::string(item) + "'");
                }
                Announcement a;
                a.robot = static_cast<RobotId>(detail::to_int(parts[0], line_no, "ann"));
                a.current = CellId{static_cast<std::int32_t>(detail::to_int(parts[1], line_no, "ann"))};
                a.next = CellId{static_cast<std::int32_t>(detail::to_int(parts[2], line_no, "ann"))};
                a.reported_value = detail::to_money(parts[3], line_no, "ann");
                rec.announcements.push_back(std::move(a));
            }
            for (auto item : detail::split_list(fields.get("blocked"))) {
                rec.blocked.push_back(CellId{static_cast<std::int32_t>(detail::to_int(item, line_no, "blocked"))});
            }
            for (auto item : detail::split_list(fields.get("chosen"))) {
                auto parts = detail::split(item, ':');
                if (parts.size() != 2 || (parts[1] != "A" && parts[1] != "S")) {
                    throw ParseError(line_no, "chosen", "expected id:A or id:S, got '" + std::string(item) + "'");
                }
                rec.outcome.chosen.moves[static_cast<RobotId>(detail::to_int(parts[0], line_no, "chosen"))] =
                        parts[1] == "A" ? Move::Advance : Move::Stay;
            }
            for (auto item : detail::split_list(fields.get("pay"))) {
                auto parts = detail::split(item, ':');
                if (parts.size() != 2) {
                    throw ParseError(line_no, "pay", "expected id:amount, got '" + std::string(item) + "'");
                }
                rec.outcome.payments[static_cast<RobotId>(detail::to_int(parts[0], line_no, "pay"))] =
                        detail::to_money(parts[1], line_no, "pay");
            }
            rec.outcome.welfare = welfare(rec.outcome.chosen, rec.announcements);
            entries.emplace_back(std::move(rec));
        } else if (fields.kind() == "transfer") {
            TransferRecord rec;
            rec.t = static_cast<int>(fields.get_int("t"));
            rec.transfer.intersection = static_cast<int>(fields.get_int("k"));
            rec.transfer.payer = Party::authority();
            auto payee = fields.get("payee");
            rec.transfer.payee = payee == "authority"
                                         ? Party::authority()
                                         : Party::of(static_cast<RobotId>(detail::to_int(payee, line_no, "payee")));
            rec.transfer.amount = detail::to_money(fields.get("amount"), line_no, "amount");
            entries.emplace_back(std::move(rec));
        } else {
            throw ParseError(line_no, "kind", "unknown record '" + std::string(fields.kind()) + "'");
        }
    }
    if (!ended) {
        throw ParseError(line_no + 1, "end", "missing end record (truncated log?)");
    }
    return entries;
}

}  // namespace sparcas
