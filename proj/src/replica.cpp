#include "era/replica.hpp"

#include <algorithm>
#include <stdexcept>

#include "era/encoding.hpp"

namespace era {

std::string_view drop_reason_name(DropReason reason) {
    switch (reason) {
        case DropReason::HashMismatch: return "hash-mismatch";
        case DropReason::RogueGenesis: return "rogue-genesis";
    }
    return "?";
}

std::vector<EventId> Replica::deliver(const Event& event, const EventId& claimed_id) {
    ingested_this_call_.clear();

    // Verify content addressing before anything enters the buffer.
    if (event_id(event) != claimed_id) {
        drops_.push_back({claimed_id, DropReason::HashMismatch});
        return {};
    }
    if (store_.contains(claimed_id) || buffer_.count(claimed_id)) return {};

    bool ready = std::all_of(event.preds.begin(), event.preds.end(),
                             [&](const EventId& p) { return store_.contains(p); });
    if (!ready) {
        buffer_.emplace(claimed_id, event);
        return std::move(ingested_this_call_);
    }

    ingest_now(event, claimed_id);
    drain_buffer();
    return std::move(ingested_this_call_);
}

void Replica::ingest_now(const Event& event, const EventId& id) {
    IngestResult result = store_.ingest(event, id);
    switch (result) {
        case IngestResult::Accepted:
            break;
        case IngestResult::DuplicateId:
            return;
        case IngestResult::RejectedHashMismatch:
            drops_.push_back({id, DropReason::HashMismatch});
            return;
        case IngestResult::RejectedRogueGenesis:
            drops_.push_back({id, DropReason::RogueGenesis});
            return;
    }
    ingested_this_call_.push_back(id);

    if (auto evidence = detect_sender_backdating(store_, event, id)) {
        evidence_.push_back(*evidence);
    }
    if (is_epoch(event.op)) {
        EpochValidation verdict = validate_epoch_event(store_, chain_, config_, event, id);
        switch (verdict.kind) {
            case EpochValidation::Kind::Accepted:
                chain_.accepted.push_back(id);
                break;
            case EpochValidation::Kind::MisbehaviorDetected:
                chain_ = rotate(std::move(chain_), config_, *verdict.evidence);
                break;
            case EpochValidation::Kind::Ignored:
                break;
        }
    }
}

void Replica::drain_buffer() {
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (auto it = buffer_.begin(); it != buffer_.end();) {
            const auto& [id, event] = *it;
            bool ready = std::all_of(event.preds.begin(), event.preds.end(),
                                     [&](const EventId& p) { return store_.contains(p); });
            if (ready) {
                Event pending = event;
                EventId pending_id = id;
                it = buffer_.erase(it);
                ingest_now(pending, pending_id);
                progressed = true;
            } else {
                ++it;
            }
        }
    }
}

EventId Replica::local_op(const Operation& op) {
    if (is_epoch(op)) throw std::logic_error("local_op: epochs are emitted via emit_epoch");
    const auto& sources = store_.sources();
    Event event = make_event(id_, op, std::vector<EventId>(sources.begin(), sources.end()));
    return ingest_local(event);
}

EventId Replica::ingest_local(const Event& event) {
    EventId id = event_id(event);
    ingested_this_call_.clear();
    ingest_now(event, id);
    drain_buffer();
    return id;
}

std::set<UserId> Replica::finality_ids() const {
    return {config_.node_list.begin(), config_.node_list.end()};
}

MaterialisedView Replica::materialised_view() const {
    MaterialisedView view;
    view.order = execution_order(store_, chain_.accepted, strategy_);
    view.state = replay(view.order.sequence, store_, finality_ids());
    view.finalized_prefix_len = view.order.finalized_prefix_len;
    return view;
}

namespace {

/// Store restricted to an id set (which must be pred-closed). Ingest order
/// of the original store is a valid causal order for any closed subset.
DagStore sub_store(const DagStore& store, const std::set<EventId>& keep) {
    DagStore out;
    for (const auto& id : store.ingest_order()) {
        if (keep.count(id)) out.ingest(store.get(id), id);
    }
    return out;
}

/// Accepted chain restricted to a sub-store. Epochs are causally chained,
/// so the surviving entries are always a prefix.
std::vector<EventId> sub_chain(const std::vector<EventId>& accepted, const DagStore& sub) {
    std::vector<EventId> out;
    for (const auto& id : accepted) {
        if (!sub.contains(id)) break;
        out.push_back(id);
    }
    return out;
}

GroupState replay_closure(const DagStore& store, const std::vector<EventId>& accepted,
                          Strategy strategy, const std::set<UserId>& finality_ids,
                          const std::set<EventId>& keep) {
    DagStore sub = sub_store(store, keep);
    auto chain = sub_chain(accepted, sub);
    auto order = execution_order(sub, chain, strategy);
    return replay(order.sequence, sub, finality_ids);
}

}  // namespace

bool is_rollback(const DagStore& store, const EpochChainState& chain, Strategy strategy,
                 const std::set<UserId>& finality_ids, const EventId& m_prime, const EventId& m) {
    if (!store.concurrent(m_prime, m)) {
        throw std::invalid_argument("is_rollback: events must be concurrent");
    }

    // Both worlds include the accepted chain's closure: epochs are
    // validated ordering facts a replica never forgets, so an event inside
    // a closed layer keeps its position on both sides of the comparison.
    std::set<EventId> chain_closure;
    if (!chain.accepted.empty() && store.contains(chain.accepted.back())) {
        chain_closure = store.ancestors(chain.accepted.back());
    }

    std::set<EventId> prime_only = store.ancestors(m_prime);
    prime_only.insert(chain_closure.begin(), chain_closure.end());
    std::set<EventId> both = store.ancestors(m);
    both.insert(prime_only.begin(), prime_only.end());

    DagStore union_store = sub_store(store, both);
    auto union_chain = sub_chain(chain.accepted, union_store);
    auto union_order = execution_order(union_store, union_chain, strategy);
    GroupState union_state = replay(union_order.sequence, union_store, finality_ids);

    GroupState prime_state = replay_closure(store, chain.accepted, strategy, finality_ids, prime_only);

    // m is rolled back when its presence leaves no trace in the union
    // view: the roles match the view without m, and m itself did not
    // apply. The second conjunct keeps an applied-but-role-neutral event
    // (a write) from counting as rolled back.
    bool m_rejected = union_state.rejected.count(m) != 0;
    return union_state.roles == prime_state.roles && m_rejected;
}

FinalityCheckResult check_final_bounded(const DagStore& store, const EpochChainState& chain,
                                        const FinalityConfig& config, Strategy strategy,
                                        const EventId& m,
                                        const std::vector<FinalityCandidate>& candidates) {
    FinalityCheckResult result;
    std::set<UserId> finality_ids(config.node_list.begin(), config.node_list.end());

    for (const auto& candidate : candidates) {
        // Anchor on the frontier of the depth-truncated non-descendants of
        // m; the synthesized event is then concurrent with m.
        std::set<EventId> scope;
        for (const auto& id : store.ingest_order()) {
            if (store.depth(id) <= candidate.anchor_depth && !store.precedes(m, id)) {
                scope.insert(id);
            }
        }
        if (scope.empty()) continue;
        DagStore truncated = sub_store(store, scope);
        const auto& anchor = truncated.sources();
        Event synthesized = make_event(candidate.sender, candidate.op,
                                       std::vector<EventId>(anchor.begin(), anchor.end()));
        EventId synthesized_id = event_id(synthesized);
        if (store.contains(synthesized_id)) continue;  // candidate already exists

        DagStore extended = store;
        if (extended.ingest(synthesized, synthesized_id) != IngestResult::Accepted) continue;

        EpochChainState extended_chain = chain;
        if (is_epoch(synthesized.op)) {
            auto verdict =
                validate_epoch_event(extended, extended_chain, config, synthesized, synthesized_id);
            if (verdict.kind == EpochValidation::Kind::Accepted) {
                extended_chain.accepted.push_back(synthesized_id);
            }
        }

        ++result.candidates_checked;
        if (is_rollback(extended, extended_chain, strategy, finality_ids, synthesized_id, m)) {
            result.final_within_bound = false;
            result.counterexample = {synthesized, synthesized_id};
            return result;
        }
    }
    return result;
}

std::vector<FinalityCandidate> enumerate_candidates(const std::vector<UserId>& users,
                                                    const FinalityConfig& config,
                                                    std::size_t max_depth,
                                                    std::uint64_t next_epoch_seq) {
    std::vector<FinalityCandidate> out;
    constexpr Role kRoles[] = {Role::Reader, Role::Writer, Role::Admin};
    for (std::size_t depth = 0; depth <= max_depth; ++depth) {
        for (const auto& user : users) {
            out.push_back({user, JoinOp{}, depth});
            out.push_back({user, WriteOp{}, depth});
            for (const auto& target : users) {
                for (Role role : kRoles) {
                    out.push_back({user, PromoteOp{target, role}, depth});
                    out.push_back({user, DemoteOp{target, role}, depth});
                }
            }
            if (config.is_finality_node(user)) {
                out.push_back({user, EpochOp{next_epoch_seq}, depth});
            }
        }
    }
    return out;
}

}  // namespace era
