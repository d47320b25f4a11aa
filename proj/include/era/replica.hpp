#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "era/auth.hpp"
#include "era/dag.hpp"
#include "era/finality.hpp"
#include "era/ordering.hpp"
#include "era/types.hpp"

namespace era {

/// Why a delivered event was dropped instead of buffered or ingested.
enum class DropReason {
    HashMismatch,
    RogueGenesis,
};

std::string_view drop_reason_name(DropReason reason);

struct DropDiagnostic {
    EventId claimed_id;
    DropReason reason;

    auto operator<=>(const DropDiagnostic&) const = default;
};

/// The state a replica exposes to the application.
struct MaterialisedView {
    GroupState state;
    ExecutionOrder order;
    std::size_t finalized_prefix_len = 0;
};

/// A participant node: buffers deliveries until causally complete, emits
/// local operations against its current sources, validates epochs into its
/// own chain view, and records backdating evidence.
///
/// One replica is a single logical thread; distinct replicas share nothing.
class Replica {
public:
    Replica(UserId id, FinalityConfig config, Strategy strategy)
        : id_(std::move(id)), config_(std::move(config)), strategy_(strategy) {}

    const UserId& id() const { return id_; }
    const DagStore& store() const { return store_; }
    const EpochChainState& chain() const { return chain_; }
    const FinalityConfig& config() const { return config_; }
    Strategy strategy() const { return strategy_; }

    /// Evidence of same-sender backdating observed at this replica.
    const std::vector<BackdateEvidence>& backdate_evidence() const { return evidence_; }
    const std::vector<DropDiagnostic>& drops() const { return drops_; }
    std::size_t buffered_count() const { return buffer_.size(); }

    /// Handles one delivered event: drops it on a bad hash, buffers it
    /// while preds are missing, otherwise ingests it and every buffered
    /// event that becomes ready. Duplicates are absorbed silently.
    /// Returns the ids ingested by this call, in ingest order.
    std::vector<EventId> deliver(const Event& event, const EventId& claimed_id);

    /// Emits a local operation anchored at the current sources and applies
    /// it to the local store. Always succeeds, even fully partitioned;
    /// authorization is enforced at replay, not at emission.
    /// Epoch emission goes through emit_epoch, not here.
    EventId local_op(const Operation& op);

    /// Ingests a locally constructed event (epoch emissions, scripted
    /// backdated events). The event must be causally complete here.
    EventId ingest_local(const Event& event);

    /// Recomputes order and state from the current store and chain.
    MaterialisedView materialised_view() const;

    std::set<UserId> finality_ids() const;

private:
    void ingest_now(const Event& event, const EventId& id);
    void drain_buffer();

    UserId id_;
    DagStore store_;
    std::map<EventId, Event> buffer_;
    EpochChainState chain_;
    FinalityConfig config_;
    Strategy strategy_;
    std::vector<BackdateEvidence> evidence_;
    std::vector<DropDiagnostic> drops_;
    std::vector<EventId> ingested_this_call_;
};

/// Whether m_prime nullifies m: replaying the union of both histories
/// yields the same roles as replaying m_prime's history alone, and m's own
/// effect is absent (m is rejected or effect-free) in the union. Both
/// events must be concurrent.
bool is_rollback(const DagStore& store, const EpochChainState& chain, Strategy strategy,
                 const std::set<UserId>& finality_ids, const EventId& m_prime, const EventId& m);

/// One synthesized concurrent event for the bounded finality check.
struct FinalityCandidate {
    UserId sender;
    Operation op;
    std::size_t anchor_depth = 0;
};

struct FinalityCheckResult {
    bool final_within_bound = true;
    std::size_t candidates_checked = 0;
    /// First rollback found: the synthesized event and its id.
    std::optional<std::pair<Event, EventId>> counterexample;
};

/// Bounded approximation of finality: true when no synthesized candidate
/// rolls back m. Candidates anchor at the sources of the depth-truncated
/// non-descendants of m, so each is concurrent with m by construction.
/// Candidate epochs are validated against a copy of the chain and, when
/// accepted, re-layer the extended store.
FinalityCheckResult check_final_bounded(const DagStore& store, const EpochChainState& chain,
                                        const FinalityConfig& config, Strategy strategy,
                                        const EventId& m,
                                        const std::vector<FinalityCandidate>& candidates);

/// Cross product users x op kinds x anchor depths 0..max_depth, the
/// default candidate enumeration for check_final_bounded. Epoch ops are
/// synthesized only for configured finality identities.
std::vector<FinalityCandidate> enumerate_candidates(const std::vector<UserId>& users,
                                                    const FinalityConfig& config,
                                                    std::size_t max_depth,
                                                    std::uint64_t next_epoch_seq);

}  // namespace era
