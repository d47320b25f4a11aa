#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "era/auth.hpp"
#include "era/dag.hpp"
#include "era/types.hpp"

namespace era {

/// How concurrent events are totally ordered.
///
/// Era layers by accepted epochs first, then orders within a layer by
/// operation class (revocations first) and event id. Seniority and
/// EventHash are the comparison baselines: one epoch-blind linear
/// extension of the whole DAG.
enum class Strategy {
    Era,
    Seniority,
    EventHash,
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view text);

/// Sentinel layer index for events not covered by any accepted epoch.
inline constexpr std::size_t kPendingLayer = std::numeric_limits<std::size_t>::max();

/// A user's position in the seniority hierarchy: the group creator has
/// depth 1, a user first empowered by a depth-i user has depth i+1, plain
/// joiners have depth 2. Ties break on the id of the user's Join event.
struct SeniorityRank {
    std::uint64_t depth = std::numeric_limits<std::uint64_t>::max();
    EventId join_event{};

    auto operator<=>(const SeniorityRank&) const = default;
};

using RankMap = std::map<UserId, SeniorityRank>;

/// Onion partition of the store induced by an epoch chain: layer k holds
/// the ancestors of epoch k not claimed by an earlier layer; everything
/// else is pending. Layers plus pending partition the store exactly.
struct EpochLayering {
    struct Layer {
        EventId epoch_event;
        std::set<EventId> members;

        bool operator==(const Layer&) const = default;
    };

    std::vector<Layer> layers;
    std::set<EventId> pending;

    /// Layer index for an id, kPendingLayer when pending.
    std::size_t layer_of(const EventId& id) const;

    bool operator==(const EpochLayering&) const = default;
};

/// Total order over the store, layered by epoch.
struct ExecutionOrder {
    std::vector<EventId> sequence;
    std::map<EventId, std::size_t> layer_of;  // kPendingLayer for pending
    std::size_t finalized_prefix_len = 0;     // positions covered by accepted epochs

    bool operator==(const ExecutionOrder&) const = default;
};

/// Partitions the store by a validated epoch chain. Each epoch event must
/// be stored; a missing one throws std::logic_error. An empty chain puts
/// the whole store in pending.
EpochLayering layer_events(const DagStore& store, const std::vector<EventId>& epoch_chain);

/// Operation-class priority used within Era layers: revocations execute
/// first, writes last. Demote=0, Promote=1, Join=2, Epoch=3, Write=4.
int op_class(const Operation& op);

/// Decides which of two concurrent same-layer events executes first.
/// Total and antisymmetric for distinct events. `ranks` is consulted by
/// Seniority only.
bool orders_before(const Event& x, const EventId& x_id, const Event& y, const EventId& y_id,
                   Strategy strategy, const RankMap& ranks);

/// Seniority ranks derived from a replay of `order`: the creator ranks
/// (1, genesis id); a user first raised by an applied Promote ranks one
/// deeper than the promoter; never-promoted joiners rank depth 2. Users
/// that never joined (e.g. external finality identities) are absent and
/// sort last.
RankMap seniority_rank(const DagStore& store, const std::vector<EventId>& order);

/// The deterministic total execution order for a store under a strategy.
/// Era concatenates epoch layers in chain order and pending last, each
/// internally ordered by (op class, id); baselines produce one linear
/// extension of the whole DAG under their tie-break rule.
ExecutionOrder execution_order(const DagStore& store, const std::vector<EventId>& epoch_chain,
                               Strategy strategy);

/// Fixture dump: one line per event,
/// "layer<TAB>position<TAB>id-hex<TAB>op-summary<TAB>verdict".
/// Layers print 1-based; pending prints "pending". Positions are 0-based.
std::string format_order_dump(const DagStore& store, const ExecutionOrder& order,
                              const GroupState& state);

}  // namespace era
