#include "era/ordering.hpp"

#include <algorithm>
#include <stdexcept>

namespace era {

namespace {

/// Comparable sort key: (primary, secondary, id) lexicographic. Era uses
/// op class as primary; Seniority uses rank depth and join id; EventHash
/// uses the id alone.
struct SortKey {
    std::uint64_t primary = 0;
    EventId secondary{};
    EventId id{};

    auto operator<=>(const SortKey&) const = default;
};

SortKey sort_key(const Event& event, const EventId& id, Strategy strategy, const RankMap& ranks) {
    switch (strategy) {
        case Strategy::Era:
            return {static_cast<std::uint64_t>(op_class(event.op)), EventId{}, id};
        case Strategy::Seniority: {
            auto it = ranks.find(event.sender);
            if (it == ranks.end()) {
                SeniorityRank unranked;  // sorts after every ranked user
                return {unranked.depth, unranked.join_event, id};
            }
            return {it->second.depth, it->second.join_event, id};
        }
        case Strategy::EventHash:
            return {0, EventId{}, id};
    }
    throw std::logic_error("unknown strategy");
}

/// Deterministic topological sort of `scope`: repeatedly emits the key-
/// minimal event whose in-scope preds are all emitted. Preds outside the
/// scope are treated as already emitted (they live in earlier layers).
std::vector<EventId> linear_extension(const DagStore& store, const std::set<EventId>& scope,
                                      Strategy strategy, const RankMap& ranks) {
    std::map<EventId, std::size_t> blocked;
    std::set<std::pair<SortKey, EventId>> ready;
    for (const auto& id : scope) {
        const Event& event = store.get(id);
        std::size_t in_scope = 0;
        for (const auto& p : event.preds) {
            if (scope.count(p)) ++in_scope;
        }
        if (in_scope == 0) {
            ready.emplace(sort_key(event, id, strategy, ranks), id);
        } else {
            blocked[id] = in_scope;
        }
    }

    std::vector<EventId> out;
    out.reserve(scope.size());
    while (!ready.empty()) {
        auto [key, id] = *ready.begin();
        ready.erase(ready.begin());
        out.push_back(id);
        for (const auto& child : store.children(id)) {
            auto it = blocked.find(child);
            if (it == blocked.end()) continue;
            if (--it->second == 0) {
                blocked.erase(it);
                ready.emplace(sort_key(store.get(child), child, strategy, ranks), child);
            }
        }
    }
    if (out.size() != scope.size()) {
        throw std::logic_error("linear_extension: scope is not pred-closed");
    }
    return out;
}

}  // namespace

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Era: return "era";
        case Strategy::Seniority: return "seniority";
        case Strategy::EventHash: return "eventhash";
    }
    return "?";
}

std::optional<Strategy> strategy_from_name(std::string_view text) {
    if (text == "era") return Strategy::Era;
    if (text == "seniority") return Strategy::Seniority;
    if (text == "eventhash") return Strategy::EventHash;
    return std::nullopt;
}

std::size_t EpochLayering::layer_of(const EventId& id) const {
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (layers[k].members.count(id)) return k;
    }
    return kPendingLayer;
}

EpochLayering layer_events(const DagStore& store, const std::vector<EventId>& epoch_chain) {
    EpochLayering out;
    std::set<EventId> claimed;
    for (const auto& epoch_id : epoch_chain) {
        if (!store.contains(epoch_id)) {
            throw std::logic_error("layer_events: epoch event missing from store " + epoch_id.hex());
        }
        EpochLayering::Layer layer;
        layer.epoch_event = epoch_id;
        for (const auto& id : store.ancestors(epoch_id)) {
            if (!claimed.count(id)) layer.members.insert(id);
        }
        claimed.insert(layer.members.begin(), layer.members.end());
        out.layers.push_back(std::move(layer));
    }
    for (const auto& [id, event] : store.events()) {
        if (!claimed.count(id)) out.pending.insert(id);
    }
    return out;
}

int op_class(const Operation& op) {
    struct Visitor {
        int operator()(const DemoteOp&) const { return 0; }
        int operator()(const PromoteOp&) const { return 1; }
        int operator()(const JoinOp&) const { return 2; }
        int operator()(const EpochOp&) const { return 3; }
        int operator()(const WriteOp&) const { return 4; }
    };
    return std::visit(Visitor{}, op);
}

bool orders_before(const Event& x, const EventId& x_id, const Event& y, const EventId& y_id,
                   Strategy strategy, const RankMap& ranks) {
    return sort_key(x, x_id, strategy, ranks) < sort_key(y, y_id, strategy, ranks);
}

RankMap seniority_rank(const DagStore& store, const std::vector<EventId>& order) {
    RankMap ranks;
    if (store.empty()) return ranks;

    // Replay the order to find applied Joins and Promotes. Epochs are
    // treated as effect-free regardless of sender, which is all rank
    // derivation needs.
    GroupState state;
    std::map<UserId, EventId> join_event;
    std::map<UserId, std::uint64_t> promote_depth;
    std::optional<UserId> creator;

    auto depth_of = [&](const UserId& user) -> std::uint64_t {
        if (creator && user == *creator) return 1;
        auto it = promote_depth.find(user);
        return it == promote_depth.end() ? 2 : it->second;
    };

    for (const auto& id : order) {
        const Event& event = store.get(id);
        if (is_epoch(event.op)) continue;
        AuthVerdict verdict = authorize(state, event, {});
        if (!verdict.authorized()) continue;
        if (std::holds_alternative<JoinOp>(event.op)) {
            if (state.roles.empty()) creator = event.sender;
            join_event.emplace(event.sender, id);
        } else if (const auto* promote = std::get_if<PromoteOp>(&event.op)) {
            promote_depth.emplace(promote->target, depth_of(event.sender) + 1);
        }
        state = apply_effect(std::move(state), event);
    }

    for (const auto& [user, join_id] : join_event) {
        ranks[user] = SeniorityRank{depth_of(user), join_id};
    }
    return ranks;
}

ExecutionOrder execution_order(const DagStore& store, const std::vector<EventId>& epoch_chain,
                               Strategy strategy) {
    ExecutionOrder out;
    if (store.empty()) return out;

    if (strategy == Strategy::Era) {
        EpochLayering layering = layer_events(store, epoch_chain);
        for (std::size_t k = 0; k < layering.layers.size(); ++k) {
            auto part = linear_extension(store, layering.layers[k].members, strategy, {});
            for (const auto& id : part) out.layer_of[id] = k;
            out.sequence.insert(out.sequence.end(), part.begin(), part.end());
        }
        out.finalized_prefix_len = out.sequence.size();
        auto part = linear_extension(store, layering.pending, strategy, {});
        for (const auto& id : part) out.layer_of[id] = kPendingLayer;
        out.sequence.insert(out.sequence.end(), part.begin(), part.end());
        return out;
    }

    std::set<EventId> everything;
    for (const auto& [id, event] : store.events()) everything.insert(id);

    RankMap ranks;
    if (strategy == Strategy::Seniority) {
        // Ranks come from a strategy-independent bootstrap extension, then
        // the final order is rebuilt under the seniority comparator.
        auto bootstrap = linear_extension(store, everything, Strategy::EventHash, {});
        ranks = seniority_rank(store, bootstrap);
    }
    out.sequence = linear_extension(store, everything, strategy, ranks);
    for (const auto& id : out.sequence) out.layer_of[id] = kPendingLayer;
    out.finalized_prefix_len = 0;
    return out;
}

std::string format_order_dump(const DagStore& store, const ExecutionOrder& order,
                              const GroupState& state) {
    std::string out;
    for (std::size_t pos = 0; pos < order.sequence.size(); ++pos) {
        const EventId& id = order.sequence[pos];
        std::size_t layer = order.layer_of.at(id);
        out += layer == kPendingLayer ? "pending" : std::to_string(layer + 1);
        out += "\t" + std::to_string(pos) + "\t" + id.hex() + "\t" + op_summary(store.get(id)) +
               "\t" + (state.rejected.count(id) ? "rejected" : "applied") + "\n";
    }
    return out;
}

}  // namespace era
