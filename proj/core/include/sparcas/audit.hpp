#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sparcas/mechanism.hpp"

namespace sparcas {

// Line-oriented audit log of every spot auction and redistribution transfer.
//
//   # sparcas-audit v1
//   auction t=<t> k=<k> ann=<id>:<cur>:<next>:<value>,... blocked=<cell>,...|- chosen=<id>:<A|S>,... pay=<id>:<amount>,...
//   transfer t=<t> k=<k> payee=<id|authority> amount=<amount>
//   end records=<n>
//
// Amounts are exact rationals ("13/200"). Records appear in simulation order.

struct AuctionRecord {
    int t = 0;
    int intersection = 0;
    std::vector<Announcement> announcements;
    std::vector<CellId> blocked;
    AuctionOutcome outcome;

    bool operator==(const AuctionRecord&) const = default;
};

struct TransferRecord {
    int t = 0;
    Transfer transfer;

    bool operator==(const TransferRecord&) const = default;
};

using AuditEntry = std::variant<AuctionRecord, TransferRecord>;

std::string format_audit_entry(const AuditEntry& entry);
std::string format_audit_log(const std::vector<AuditEntry>& entries);

/// Throws ParseError naming the line and field on malformed input, including
/// a missing end record (truncation).
std::vector<AuditEntry> parse_audit_log(std::string_view text);

}  // namespace sparcas
