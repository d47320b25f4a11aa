#include "era/finality.hpp"

#include <algorithm>
#include <stdexcept>

namespace era {

bool FinalityConfig::is_finality_node(const UserId& user) const {
    return std::find(node_list.begin(), node_list.end(), user) != node_list.end();
}

std::optional<UserId> EpochChainState::active_node(const FinalityConfig& config) const {
    if (active_node_index >= config.node_list.size()) return std::nullopt;
    return config.node_list[active_node_index];
}

std::string_view epoch_ignore_reason_name(EpochIgnoreReason reason) {
    switch (reason) {
        case EpochIgnoreReason::NotActiveNode: return "not-active-node";
        case EpochIgnoreReason::StaleSeq: return "stale-seq";
    }
    return "?";
}

bool should_emit(std::uint64_t pending_count, bool pending_has_demote,
                 const FinalityConfig& config) {
    if (pending_count >= config.pending_threshold) return true;
    return config.demote_triggers && pending_has_demote && pending_count >= 1;
}

Event emit_epoch(const DagStore& store, const UserId& finality_node,
                 const EpochChainState& chain) {
    if (store.empty()) throw std::logic_error("emit_epoch: empty store");
    const auto& sources = store.sources();
    return make_event(finality_node, EpochOp{chain.next_seq()},
                      std::vector<EventId>(sources.begin(), sources.end()));
}

EpochValidation validate_epoch_event(const DagStore& store, const EpochChainState& chain,
                                     const FinalityConfig& config, const Event& epoch,
                                     const EventId& epoch_id) {
    const auto* op = std::get_if<EpochOp>(&epoch.op);
    if (op == nullptr) throw std::logic_error("validate_epoch_event: not an epoch event");

    auto active = chain.active_node(config);
    if (!active || epoch.sender != *active) {
        return EpochValidation::ignored(EpochIgnoreReason::NotActiveNode);
    }

    // Concurrent epochs from the active node rewrite history; that is
    // detectable backdating and the conflicting epoch is never accepted.
    for (const auto& accepted_id : chain.accepted) {
        if (store.get(accepted_id).sender != epoch.sender) continue;
        if (store.concurrent(accepted_id, epoch_id)) {
            return EpochValidation::misbehavior(
                BackdateEvidence{epoch.sender, accepted_id, epoch_id});
        }
    }

    if (op->seq != chain.next_seq()) {
        return EpochValidation::ignored(EpochIgnoreReason::StaleSeq);
    }
    if (!chain.accepted.empty() && !store.precedes(chain.accepted.back(), epoch_id)) {
        // Correct seq but not an extension of the accepted chain.
        return EpochValidation::ignored(EpochIgnoreReason::StaleSeq);
    }
    return EpochValidation::accepted();
}

EpochChainState rotate(EpochChainState chain, const FinalityConfig& config,
                       BackdateEvidence evidence) {
    if (chain.active_node_index < config.node_list.size()) {
        ++chain.active_node_index;
    }
    chain.misbehavior.push_back(std::move(evidence));
    return chain;
}

}  // namespace era
