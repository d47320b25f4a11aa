#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "era/dag.hpp"
#include "era/types.hpp"

namespace era {

/// Finality-node roster and epoch emission policy. Nodes are tried in
/// list order; epochs fire when the pending epoch reaches the threshold,
/// or immediately on a pending demotion when demote_triggers is set.
struct FinalityConfig {
    std::vector<UserId> node_list;  // ordered, duplicate-free
    std::uint64_t pending_threshold = 4;
    bool demote_triggers = false;

    bool is_finality_node(const UserId& user) const;
};

/// Per-replica view of the accepted epoch chain. Accepted epochs form a
/// causal chain with gap-free seq 1..len, continuing across rotations.
struct EpochChainState {
    std::vector<EventId> accepted;
    std::size_t active_node_index = 0;
    std::vector<BackdateEvidence> misbehavior;

    std::uint64_t next_seq() const { return accepted.size() + 1; }

    /// Active node id, or nullopt when the list is exhausted (chain
    /// frozen: nothing further is accepted, new events stay pending).
    std::optional<UserId> active_node(const FinalityConfig& config) const;
};

enum class EpochIgnoreReason {
    NotActiveNode,
    StaleSeq,
};

std::string_view epoch_ignore_reason_name(EpochIgnoreReason reason);

/// Verdict on an ingested epoch event.
struct EpochValidation {
    enum class Kind { Accepted, Ignored, MisbehaviorDetected };

    Kind kind;
    std::optional<EpochIgnoreReason> ignore_reason;
    std::optional<BackdateEvidence> evidence;

    static EpochValidation accepted() { return {Kind::Accepted, {}, {}}; }
    static EpochValidation ignored(EpochIgnoreReason r) { return {Kind::Ignored, r, {}}; }
    static EpochValidation misbehavior(BackdateEvidence e) {
        return {Kind::MisbehaviorDetected, {}, std::move(e)};
    }
};

/// Emission trigger: pending epoch reached the size threshold, or holds a
/// demotion and on-demand demote triggering is enabled.
bool should_emit(std::uint64_t pending_count, bool pending_has_demote,
                 const FinalityConfig& config);

/// Builds the next epoch event for the active node: it announces the
/// store's current sources as its preds, so an honest successor epoch
/// always descends from the previous one.
Event emit_epoch(const DagStore& store, const UserId& finality_node,
                 const EpochChainState& chain);

/// Validates an ingested epoch event against the chain. An epoch from the
/// active node that is concurrent with one of that sender's accepted
/// epochs is detectable backdating: it is not accepted and the caller
/// must rotate. Otherwise it is accepted only with the next seq and the
/// previous accepted epoch in its past.
EpochValidation validate_epoch_event(const DagStore& store, const EpochChainState& chain,
                                     const FinalityConfig& config, const Event& epoch,
                                     const EventId& epoch_id);

/// Advances to the next listed node, recording the evidence. Previously
/// accepted epochs are kept: finalized layers never change. With the list
/// exhausted the chain freezes; liveness degrades, safety holds.
EpochChainState rotate(EpochChainState chain, const FinalityConfig& config,
                       BackdateEvidence evidence);

}  // namespace era
