#include "era/auth.hpp"

#include <stdexcept>

namespace era {

std::string_view auth_reason_name(AuthReason reason) {
    switch (reason) {
        case AuthReason::NotJoined: return "not-joined";
        case AuthReason::NotAdmin: return "not-admin";
        case AuthReason::NotWriter: return "not-writer";
        case AuthReason::NotPromotion: return "not-promotion";
        case AuthReason::NotDemotion: return "not-demotion";
        case AuthReason::AlreadyJoined: return "already-joined";
        case AuthReason::TargetNotJoined: return "target-not-joined";
        case AuthReason::EpochFromNonFinalityNode: return "epoch-from-non-finality-node";
    }
    return "?";
}

AuthVerdict authorize(const GroupState& state, const Event& event,
                      const std::set<UserId>& finality_ids) {
    const UserId& sender = event.sender;
    struct Visitor {
        const GroupState& state;
        const UserId& sender;
        const std::set<UserId>& finality_ids;

        AuthVerdict operator()(const JoinOp&) const {
            if (state.joined(sender)) return AuthVerdict::deny(AuthReason::AlreadyJoined);
            return AuthVerdict::ok();
        }
        AuthVerdict operator()(const PromoteOp& op) const {
            if (auto denied = admin_check()) return *denied;
            if (!state.joined(op.target)) return AuthVerdict::deny(AuthReason::TargetNotJoined);
            if (!(op.role > state.roles.at(op.target))) {
                return AuthVerdict::deny(AuthReason::NotPromotion);
            }
            return AuthVerdict::ok();
        }
        AuthVerdict operator()(const DemoteOp& op) const {
            if (auto denied = admin_check()) return *denied;
            if (!state.joined(op.target)) return AuthVerdict::deny(AuthReason::TargetNotJoined);
            if (!(op.role < state.roles.at(op.target))) {
                return AuthVerdict::deny(AuthReason::NotDemotion);
            }
            return AuthVerdict::ok();
        }
        AuthVerdict operator()(const WriteOp&) const {
            if (!state.joined(sender)) return AuthVerdict::deny(AuthReason::NotJoined);
            if (state.roles.at(sender) < Role::Writer) {
                return AuthVerdict::deny(AuthReason::NotWriter);
            }
            return AuthVerdict::ok();
        }
        AuthVerdict operator()(const EpochOp&) const {
            if (!finality_ids.count(sender)) {
                return AuthVerdict::deny(AuthReason::EpochFromNonFinalityNode);
            }
            return AuthVerdict::ok();
        }

        std::optional<AuthVerdict> admin_check() const {
            if (!state.joined(sender)) return AuthVerdict::deny(AuthReason::NotJoined);
            if (state.roles.at(sender) < Role::Admin) return AuthVerdict::deny(AuthReason::NotAdmin);
            return std::nullopt;
        }
    };
    return std::visit(Visitor{state, sender, finality_ids}, event.op);
}

GroupState apply_effect(GroupState state, const Event& event) {
    struct Visitor {
        GroupState& state;
        const UserId& sender;

        void operator()(const JoinOp&) const {
            if (state.roles.empty()) {
                state.roles[sender] = Role::Admin;
                state.genesis_user = sender;
            } else {
                state.roles[sender] = Role::Reader;
            }
        }
        void operator()(const PromoteOp& op) const { state.roles[op.target] = op.role; }
        void operator()(const DemoteOp& op) const { state.roles[op.target] = op.role; }
        void operator()(const WriteOp&) const {}
        void operator()(const EpochOp&) const {}
    };
    std::visit(Visitor{state, event.sender}, event.op);
    return state;
}

GroupState replay(const std::vector<EventId>& order, const DagStore& store,
                  const std::set<UserId>& finality_ids) {
    if (order.size() != store.size()) {
        throw std::logic_error("replay: order does not cover the store");
    }
    GroupState state;
    std::set<EventId> seen;
    for (const auto& id : order) {
        if (!seen.insert(id).second) {
            throw std::logic_error("replay: duplicate event in order " + id.hex());
        }
        const Event& event = store.get(id);
        AuthVerdict verdict = authorize(state, event, finality_ids);
        if (verdict.authorized()) {
            state = apply_effect(std::move(state), event);
        } else {
            state.rejected.insert(id);
        }
    }
    return state;
}

std::string format_group_state(const GroupState& state) {
    std::string out;
    for (const auto& [user, role] : state.roles) {
        out += "role " + user.name + " " + std::string(role_name(role)) + "\n";
    }
    for (const auto& id : state.rejected) {
        out += "rejected " + id.hex() + "\n";
    }
    return out;
}

}  // namespace era
