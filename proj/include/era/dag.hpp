#pragma once

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "era/types.hpp"

namespace era {

/// Outcome of DagStore::ingest. DuplicateId is an idempotent no-op, not a
/// failure: the event is already stored under the same content hash.
enum class IngestResult {
    Accepted,
    DuplicateId,
    RejectedHashMismatch,
    RejectedRogueGenesis,
};

std::string_view ingest_result_name(IngestResult result);

inline bool ingest_stored(IngestResult r) {
    return r == IngestResult::Accepted || r == IngestResult::DuplicateId;
}

/// Content-addressed event store. Closed under predecessors: every pred of a
/// stored event is itself stored (callers buffer out-of-order arrivals).
/// Acyclic by construction, since an event id is a hash of its preds.
///
/// Single-writer, multi-reader: ingest is serialized, queries are const.
class DagStore {
public:
    /// Validates and stores an event. Preds must already be present;
    /// a missing pred is a caller bug and throws std::logic_error.
    IngestResult ingest(const Event& event, const EventId& claimed_id);

    bool contains(const EventId& id) const { return events_.count(id) != 0; }
    bool empty() const { return events_.empty(); }
    std::size_t size() const { return events_.size(); }

    /// Looks up a stored event; throws std::out_of_range for unknown ids.
    const Event& get(const EventId& id) const;

    const std::optional<EventId>& genesis() const { return genesis_; }

    /// Ids in ingest order. Parents always precede children, so iterating
    /// this sequence is a valid causal replay of the store.
    const std::vector<EventId>& ingest_order() const { return ingest_order_; }

    /// Events with no children (the current frontier).
    const std::set<EventId>& sources() const { return sources_; }

    const std::set<EventId>& children(const EventId& id) const;

    /// True iff x == y or x is reachable from y via pred edges.
    bool precedes(const EventId& x, const EventId& y) const;

    /// True iff x != y and neither precedes the other.
    bool concurrent(const EventId& x, const EventId& y) const;

    /// {v : v precedes x}, including x itself.
    std::set<EventId> ancestors(const EventId& x) const;

    /// Longest pred-path length from a root; genesis has depth 0.
    std::size_t depth(const EventId& id) const;

    /// Frontier of the sub-DAG of events with depth <= max_depth.
    std::set<EventId> sources_at_depth(std::size_t max_depth) const;

    /// Maximal same-sender events; singleton while the sender is honest.
    const std::set<EventId>& sender_tips(const UserId& sender) const;

    const std::map<EventId, Event>& events() const { return events_; }

private:
    std::map<EventId, Event> events_;
    std::map<EventId, std::set<EventId>> children_;
    std::map<UserId, std::set<EventId>> sender_tips_;
    std::set<EventId> sources_;
    std::vector<EventId> ingest_order_;
    std::map<EventId, std::size_t> depth_;
    std::optional<EventId> genesis_;
};

/// Checks a freshly ingested event against the sender's previous tips.
/// Two concurrent events from one sender prove backdating; the returned
/// evidence pairs the smallest conflicting stored event with the new one.
///
/// Call immediately after the event's ingest, before the sender sends
/// anything newer.
std::optional<BackdateEvidence> detect_sender_backdating(const DagStore& store,
                                                         const Event& incoming,
                                                         const EventId& incoming_id);

}  // namespace era
