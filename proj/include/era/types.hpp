#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace era {

/// 32-byte content hash identifying an event. Ordered bytewise.
struct EventId {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const EventId&) const = default;

    /// Lowercase hex rendering used in all text output.
    std::string hex() const;

    /// Parses a 64-char lowercase/uppercase hex string.
    static std::optional<EventId> from_hex(std::string_view text);
};

/// Participant identity. Finality nodes carry UserIds too.
struct UserId {
    std::string name;

    auto operator<=>(const UserId&) const = default;
};

/// Group roles, totally ordered Reader < Writer < Admin.
enum class Role : std::uint8_t {
    Reader = 0x00,
    Writer = 0x01,
    Admin = 0x02,
};

std::string_view role_name(Role role);
std::optional<Role> role_from_name(std::string_view text);

struct JoinOp {
    auto operator<=>(const JoinOp&) const = default;
};

struct PromoteOp {
    UserId target;
    Role role;
    auto operator<=>(const PromoteOp&) const = default;
};

struct DemoteOp {
    UserId target;
    Role role;
    auto operator<=>(const DemoteOp&) const = default;
};

struct WriteOp {
    std::string payload;
    auto operator<=>(const WriteOp&) const = default;
};

struct EpochOp {
    std::uint64_t seq = 0;
    auto operator<=>(const EpochOp&) const = default;
};

using Operation = std::variant<JoinOp, PromoteOp, DemoteOp, WriteOp, EpochOp>;

/// Wire tag for each operation kind.
std::uint8_t op_tag(const Operation& op);

bool is_demote(const Operation& op);
bool is_epoch(const Operation& op);

/// A DAG vertex. The id is derived (hash of the canonical encoding), never
/// stored inside the event itself.
struct Event {
    UserId sender;
    Operation op;
    std::vector<EventId> preds;  // sorted ascending, no duplicates

    auto operator<=>(const Event&) const = default;
};

/// Normalizes preds (sort + dedup) and returns the event.
Event make_event(UserId sender, Operation op, std::vector<EventId> preds);

/// Human-readable one-liner, e.g. "promote(a,b,Admin)" or "epoch(f1,3)".
std::string op_summary(const Event& event);

/// Short form used for DOT labels, e.g. "a:promote(b,Admin)".
std::string op_label(const Event& event);

/// Two concurrent events from one sender: proof of a backdating attempt.
struct BackdateEvidence {
    UserId sender;
    EventId event_a;  // previously stored
    EventId event_b;  // the later-ingested one

    auto operator<=>(const BackdateEvidence&) const = default;
};

}  // namespace era
