#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "era/dag.hpp"
#include "era/types.hpp"

namespace era {

/// Why an operation was refused at its position in the execution order.
enum class AuthReason {
    NotJoined,
    NotAdmin,
    NotWriter,
    NotPromotion,
    NotDemotion,
    AlreadyJoined,
    TargetNotJoined,
    EpochFromNonFinalityNode,
};

std::string_view auth_reason_name(AuthReason reason);

struct AuthVerdict {
    std::optional<AuthReason> denial;

    bool authorized() const { return !denial.has_value(); }

    static AuthVerdict ok() { return {}; }
    static AuthVerdict deny(AuthReason r) { return {r}; }
};

/// The materialised view of the group: who holds which role, plus the set
/// of events that were refused during replay. Refused events stay in the
/// DAG and in the order; they simply have no effect.
struct GroupState {
    std::map<UserId, Role> roles;  // presence = joined
    std::set<EventId> rejected;
    std::optional<UserId> genesis_user;

    bool joined(const UserId& user) const { return roles.count(user) != 0; }

    bool operator==(const GroupState&) const = default;
};

/// Role-based authorization of a single operation against the state at its
/// position. Pure; returns a verdict, never fails.
///
/// Join: anyone, once. Promote: Admin only, strictly raising a joined
/// target. Demote: Admin only, strictly lowering a joined target (self-
/// demotion allowed). Write: Writer or Admin. Epoch: configured finality
/// identities only, no group role required.
AuthVerdict authorize(const GroupState& state, const Event& event,
                      const std::set<UserId>& finality_ids);

/// Applies an authorized event's effect. The first Join makes the sender
/// Admin (the group creator); later Joins enter as Reader. Write and Epoch
/// leave the state untouched.
GroupState apply_effect(GroupState state, const Event& event);

/// Folds authorize + apply over a total order covering the whole store.
/// Unauthorized events land in `rejected` and have no effect. Throws
/// std::logic_error if the order does not cover the store exactly once.
GroupState replay(const std::vector<EventId>& order, const DagStore& store,
                  const std::set<UserId>& finality_ids);

/// Deterministic text report: users sorted bytewise, capitalized role
/// names, rejected ids as sorted hex.
std::string format_group_state(const GroupState& state);

}  // namespace era
