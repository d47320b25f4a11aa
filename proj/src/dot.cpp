#include "era/dot.hpp"

#include "era/ordering.hpp"

namespace era {

namespace {

std::string node_line(const DagStore& store, const GroupState& state, const EventId& id,
                      const std::string& indent) {
    std::string attrs = "label=\"" + op_label(store.get(id)) + "\"";
    if (state.rejected.count(id)) attrs += ", style=\"rounded,dashed\", color=gray40";
    return indent + "\"" + id.hex() + "\" [" + attrs + "];\n";
}

}  // namespace

std::string render_dot(const DagStore& store, const std::vector<EventId>& epoch_chain,
                       const GroupState& state) {
    EpochLayering layering = layer_events(store, epoch_chain);

    std::string out = "digraph era {\n";
    out += "  rankdir=TB;\n";
    out += "  node [shape=box, style=rounded];\n";

    // Onion nesting: the outermost cluster is the newest epoch, closing
    // over every earlier layer.
    std::string indent = "  ";
    for (std::size_t k = layering.layers.size(); k > 0; --k) {
        out += indent + "subgraph cluster_epoch_" + std::to_string(k) + " {\n";
        indent += "  ";
        out += indent + "label=\"epoch " + std::to_string(k) + "\";\n";
    }
    for (std::size_t k = 0; k < layering.layers.size(); ++k) {
        for (const auto& id : layering.layers[k].members) {
            out += node_line(store, state, id, indent);
        }
        indent.resize(indent.size() - 2);
        out += indent + "}\n";
    }

    if (!layering.pending.empty()) {
        if (layering.layers.empty()) {
            // No epochs: keep the graph flat rather than wrapping
            // everything in a pending box.
            for (const auto& id : layering.pending) {
                out += node_line(store, state, id, "  ");
            }
        } else {
            out += "  subgraph cluster_pending {\n";
            out += "    label=\"pending\";\n";
            for (const auto& id : layering.pending) {
                out += node_line(store, state, id, "    ");
            }
            out += "  }\n";
        }
    }

    for (const auto& [id, event] : store.events()) {
        for (const auto& pred : event.preds) {
            out += "  \"" + pred.hex() + "\" -> \"" + id.hex() + "\";\n";
        }
    }
    out += "}\n";
    return out;
}

}  // namespace era
