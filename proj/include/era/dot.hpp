#pragma once

#include <string>
#include <vector>

#include "era/auth.hpp"
#include "era/dag.hpp"

namespace era {

/// Graphviz export of a replica's DAG. Events are boxes labeled
/// "sender:op"; edges run pred -> child. Accepted epochs draw as nested
/// onion clusters (layer 1 innermost); pending events sit in a separate
/// flat cluster labeled "pending". Rejected events render dashed. Output
/// is deterministic: nodes and edges are emitted in id order.
std::string render_dot(const DagStore& store, const std::vector<EventId>& epoch_chain,
                       const GroupState& state);

}  // namespace era
