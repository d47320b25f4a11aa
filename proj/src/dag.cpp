#include "era/dag.hpp"

#include <algorithm>
#include <stdexcept>

#include "era/encoding.hpp"

namespace era {

namespace {
const std::set<EventId> kEmptySet;
}

std::string_view ingest_result_name(IngestResult result) {
    switch (result) {
        case IngestResult::Accepted: return "accepted";
        case IngestResult::DuplicateId: return "duplicate";
        case IngestResult::RejectedHashMismatch: return "hash-mismatch";
        case IngestResult::RejectedRogueGenesis: return "rogue-genesis";
    }
    return "?";
}

IngestResult DagStore::ingest(const Event& raw, const EventId& claimed_id) {
    // Content addressing first: an id that does not match the bytes is the
    // equivocation case and must never be stored. The encoding sorts and
    // dedups preds, so store the normalized event the id commits to.
    EventId actual = event_id(raw);
    if (actual != claimed_id) return IngestResult::RejectedHashMismatch;
    Event event = make_event(raw.sender, raw.op, raw.preds);

    if (events_.count(actual)) return IngestResult::DuplicateId;

    for (const auto& p : event.preds) {
        if (!events_.count(p)) {
            throw std::logic_error("DagStore::ingest: missing predecessor " + p.hex());
        }
    }

    if (event.preds.empty()) {
        // Exactly one parentless event per group, and it must be a Join.
        if (genesis_.has_value() || !std::holds_alternative<JoinOp>(event.op)) {
            return IngestResult::RejectedRogueGenesis;
        }
    }
    // Non-genesis events reach genesis through their preds automatically:
    // preds are stored, the store is pred-closed, and the only accepted
    // parentless event is the genesis Join.

    std::size_t d = 0;
    for (const auto& p : event.preds) {
        d = std::max(d, depth_.at(p) + 1);
        children_[p].insert(actual);
        sources_.erase(p);
    }
    depth_[actual] = d;
    children_[actual];
    sources_.insert(actual);
    ingest_order_.push_back(actual);
    if (event.preds.empty()) genesis_ = actual;

    auto& tips = sender_tips_[event.sender];
    events_.emplace(actual, std::move(event));
    for (auto it = tips.begin(); it != tips.end();) {
        if (precedes(*it, actual)) {
            it = tips.erase(it);
        } else {
            ++it;
        }
    }
    tips.insert(actual);

    return IngestResult::Accepted;
}

const Event& DagStore::get(const EventId& id) const {
    auto it = events_.find(id);
    if (it == events_.end()) throw std::out_of_range("unknown event id " + id.hex());
    return it->second;
}

const std::set<EventId>& DagStore::children(const EventId& id) const {
    auto it = children_.find(id);
    if (it == children_.end()) throw std::out_of_range("unknown event id " + id.hex());
    return it->second;
}

bool DagStore::precedes(const EventId& x, const EventId& y) const {
    if (!events_.count(x) || !events_.count(y)) {
        throw std::out_of_range("precedes: unknown event id");
    }
    if (x == y) return true;
    // Depth prunes the walk: an ancestor is never deeper than its descendant.
    const std::size_t x_depth = depth_.at(x);
    std::vector<EventId> stack{y};
    std::set<EventId> seen;
    while (!stack.empty()) {
        EventId cur = stack.back();
        stack.pop_back();
        for (const auto& p : events_.at(cur).preds) {
            if (p == x) return true;
            if (depth_.at(p) <= x_depth) continue;
            if (seen.insert(p).second) stack.push_back(p);
        }
    }
    return false;
}

bool DagStore::concurrent(const EventId& x, const EventId& y) const {
    return x != y && !precedes(x, y) && !precedes(y, x);
}

std::set<EventId> DagStore::ancestors(const EventId& x) const {
    if (!events_.count(x)) throw std::out_of_range("ancestors: unknown event id");
    std::set<EventId> out;
    std::vector<EventId> stack{x};
    out.insert(x);
    while (!stack.empty()) {
        EventId cur = stack.back();
        stack.pop_back();
        for (const auto& p : events_.at(cur).preds) {
            if (out.insert(p).second) stack.push_back(p);
        }
    }
    return out;
}

std::size_t DagStore::depth(const EventId& id) const {
    auto it = depth_.find(id);
    if (it == depth_.end()) throw std::out_of_range("depth: unknown event id");
    return it->second;
}

std::set<EventId> DagStore::sources_at_depth(std::size_t max_depth) const {
    std::set<EventId> out;
    for (const auto& [id, event] : events_) {
        if (depth_.at(id) > max_depth) continue;
        bool has_shallow_child = false;
        for (const auto& c : children_.at(id)) {
            if (depth_.at(c) <= max_depth) {
                has_shallow_child = true;
                break;
            }
        }
        if (!has_shallow_child) out.insert(id);
    }
    return out;
}

const std::set<EventId>& DagStore::sender_tips(const UserId& sender) const {
    auto it = sender_tips_.find(sender);
    return it == sender_tips_.end() ? kEmptySet : it->second;
}

std::optional<BackdateEvidence> detect_sender_backdating(const DagStore& store,
                                                         const Event& incoming,
                                                         const EventId& incoming_id) {
    for (const auto& tip : store.sender_tips(incoming.sender)) {
        if (tip == incoming_id) continue;
        if (store.concurrent(tip, incoming_id)) {
            return BackdateEvidence{incoming.sender, tip, incoming_id};
        }
    }
    return std::nullopt;
}

}  // namespace era
