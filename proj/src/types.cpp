#include "era/types.hpp"

#include <algorithm>

namespace era {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string EventId::hex() const {
    std::string out;
    out.reserve(64);
    for (auto b : bytes) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::optional<EventId> EventId::from_hex(std::string_view text) {
    if (text.size() != 64) return std::nullopt;
    EventId id;
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = hex_value(text[2 * i]);
        int lo = hex_value(text[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        id.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return id;
}

std::string_view role_name(Role role) {
    switch (role) {
        case Role::Reader: return "Reader";
        case Role::Writer: return "Writer";
        case Role::Admin: return "Admin";
    }
    return "?";
}

std::optional<Role> role_from_name(std::string_view text) {
    if (text == "reader" || text == "Reader") return Role::Reader;
    if (text == "writer" || text == "Writer") return Role::Writer;
    if (text == "admin" || text == "Admin") return Role::Admin;
    return std::nullopt;
}

std::uint8_t op_tag(const Operation& op) {
    return static_cast<std::uint8_t>(op.index());
}

bool is_demote(const Operation& op) {
    return std::holds_alternative<DemoteOp>(op);
}

bool is_epoch(const Operation& op) {
    return std::holds_alternative<EpochOp>(op);
}

Event make_event(UserId sender, Operation op, std::vector<EventId> preds) {
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    return Event{std::move(sender), std::move(op), std::move(preds)};
}

std::string op_summary(const Event& event) {
    const std::string& s = event.sender.name;
    struct Visitor {
        const std::string& s;
        std::string operator()(const JoinOp&) const { return "join(" + s + ")"; }
        std::string operator()(const PromoteOp& p) const {
            return "promote(" + s + "," + p.target.name + "," + std::string(role_name(p.role)) + ")";
        }
        std::string operator()(const DemoteOp& d) const {
            return "demote(" + s + "," + d.target.name + "," + std::string(role_name(d.role)) + ")";
        }
        std::string operator()(const WriteOp&) const { return "write(" + s + ")"; }
        std::string operator()(const EpochOp& e) const {
            return "epoch(" + s + "," + std::to_string(e.seq) + ")";
        }
    };
    return std::visit(Visitor{s}, event.op);
}

std::string op_label(const Event& event) {
    struct Visitor {
        std::string operator()(const JoinOp&) const { return "join"; }
        std::string operator()(const PromoteOp& p) const {
            return "promote(" + p.target.name + "," + std::string(role_name(p.role)) + ")";
        }
        std::string operator()(const DemoteOp& d) const {
            return "demote(" + d.target.name + "," + std::string(role_name(d.role)) + ")";
        }
        std::string operator()(const WriteOp&) const { return "write"; }
        std::string operator()(const EpochOp& e) const { return "epoch(" + std::to_string(e.seq) + ")"; }
    };
    return event.sender.name + ":" + std::visit(Visitor{}, event.op);
}

}  // namespace era
