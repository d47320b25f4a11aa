#include "era/simnet.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "era/encoding.hpp"
#include "era/sha256.hpp"

namespace era {

namespace {

std::string short_hex(const EventId& id) { return id.hex().substr(0, 16); }

std::string digest_of_string(const std::string& text) {
    std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(text.data()),
                                        text.size());
    return short_hex(sha256(bytes));
}

std::string view_text(const Replica& replica) {
    MaterialisedView view = replica.materialised_view();
    return format_group_state(view.state) +
           "finalized-prefix " + std::to_string(view.finalized_prefix_len) + "\n";
}

class Simulation {
public:
    explicit Simulation(const Scenario& scenario) : scenario_(scenario) {
        for (const auto& id : scenario.replicas) {
            replicas_.emplace(id, Replica(id, scenario.finality, scenario.strategy));
            group_of_[id] = 0;
        }
    }

    Trace run() {
        Trace trace;
        trace.strategy = scenario_.strategy;
        trace.seed = scenario_.seed;
        for (std::size_t i = 0; i < scenario_.script.size(); ++i) {
            execute(scenario_.script[i], i, trace);
        }
        for (const auto& [id, replica] : replicas_) {
            trace.finals.emplace(id, summarize(replica));
        }
        trace.labels = labels_;
        return trace;
    }

    /// Every event created during the run, in creation order (a causal
    /// order: an event only cites earlier registry entries).
    const std::vector<std::pair<EventId, Event>>& registry() const { return registry_; }

    std::map<UserId, Replica> take_replicas() { return std::move(replicas_); }

private:
    Replica& replica_at(const UserId& id, int line) {
        auto it = replicas_.find(id);
        if (it == replicas_.end()) {
            throw ScenarioRuntimeError(line, "no replica named '" + id.name + "'");
        }
        return it->second;
    }

    bool blocked(const UserId& from, const UserId& to) const {
        return group_of_.at(from) != group_of_.at(to);
    }

    /// Sends every not-yet-sent event from one store to another replica,
    /// in the sender's ingest order (FIFO per ordered link).
    std::size_t deliver_new(const UserId& from, const UserId& to) {
        Replica& src = replicas_.at(from);
        Replica& dst = replicas_.at(to);
        auto& sent = sent_[{from, to}];
        std::size_t moved = 0;
        for (const auto& id : src.store().ingest_order()) {
            if (!sent.insert(id).second) continue;
            dst.deliver(src.store().get(id), id);
            ++moved;
        }
        return moved;
    }

    /// Auto epoch emission: an active finality node with a replica emits
    /// whenever its pending epoch crosses the configured trigger.
    bool maybe_auto_epochs() {
        if (!scenario_.auto_epochs) return false;
        bool emitted = false;
        for (auto& [id, replica] : replicas_) {
            for (int guard = 0; guard < 8; ++guard) {
                auto active = replica.chain().active_node(replica.config());
                if (!active || *active != id || replica.store().empty()) break;
                EpochLayering layering =
                    layer_events(replica.store(), replica.chain().accepted);
                bool has_demote = std::any_of(
                    layering.pending.begin(), layering.pending.end(),
                    [&](const EventId& e) { return is_demote(replica.store().get(e).op); });
                if (!should_emit(layering.pending.size(), has_demote, replica.config())) break;
                Event epoch = emit_epoch(replica.store(), id, replica.chain());
                EventId epoch_id = replica.ingest_local(epoch);
                registry_.emplace_back(epoch_id, epoch);
                emitted = true;
            }
        }
        return emitted;
    }

    void bind_label(const std::optional<std::string>& label, const EventId& id) {
        if (label) labels_[*label] = id;
    }

    EventId resolve_label(const std::string& label, int line) const {
        auto it = labels_.find(label);
        if (it == labels_.end()) {
            throw ScenarioRuntimeError(line, "label '" + label + "' is not bound yet");
        }
        return it->second;
    }

    std::string digests() const {
        std::string out = "digests";
        for (const auto& [id, replica] : replicas_) {
            std::string state;
            for (const auto& eid : replica.store().ingest_order()) state += eid.hex();
            std::sort(state.begin(), state.end());
            for (const auto& eid : replica.chain().accepted) state += eid.hex();
            state += std::to_string(replica.chain().active_node_index);
            state += std::to_string(replica.backdate_evidence().size());
            state += std::to_string(replica.buffered_count());
            out += " " + id.name + "=" + digest_of_string(state);
        }
        return out;
    }

    ReplicaSummary summarize(const Replica& replica) const {
        ReplicaSummary s;
        s.event_count = replica.store().size();
        s.buffered = replica.buffered_count();
        MaterialisedView view = replica.materialised_view();
        s.state = std::move(view.state);
        s.finalized_prefix_len = view.finalized_prefix_len;
        s.active_node = replica.chain().active_node(replica.config());
        s.backdate_evidence = replica.backdate_evidence();
        s.misbehavior = replica.chain().misbehavior;
        s.drops = replica.drops();
        return s;
    }

    void log_step(Trace& trace, int line, const std::string& text) {
        trace.step_log.push_back("line " + std::to_string(line) + ": " + text + "\n  " + digests());
    }

    void record(Trace& trace, int line, const std::string& description, bool passed,
                std::string detail) {
        trace.assertions.push_back({line, description, passed, std::move(detail)});
        log_step(trace, line, description + (passed ? " -> PASS" : " -> FAIL"));
    }

    void execute(const Step& step, std::size_t index, Trace& trace);

    const Scenario& scenario_;
    std::map<UserId, Replica> replicas_;
    std::map<std::pair<UserId, UserId>, std::set<EventId>> sent_;
    std::map<UserId, int> group_of_;
    std::map<std::string, EventId> labels_;
    std::vector<std::pair<EventId, Event>> registry_;
    bool genesis_created_ = false;
};

void Simulation::execute(const Step& step, std::size_t, Trace& trace) {
    const int line = step.line;
    struct Visitor {
        Simulation& sim;
        Trace& trace;
        int line;

        void operator()(const OpStep& s) {
            Replica& r = sim.replica_at(s.replica, line);
            if (r.store().empty()) {
                if (sim.genesis_created_) {
                    throw ScenarioRuntimeError(
                        line, "replica '" + s.replica.name +
                                  "' has not seen the genesis yet; deliver it first");
                }
                if (!std::holds_alternative<JoinOp>(s.op)) {
                    throw ScenarioRuntimeError(line, "the first operation must be a join");
                }
            }
            EventId id = r.local_op(s.op);
            sim.genesis_created_ = true;
            sim.registry_.emplace_back(id, r.store().get(id));
            sim.bind_label(s.label, id);
            sim.log_step(trace, line,
                         "op " + op_summary(r.store().get(id)) + " -> " + short_hex(id));
        }

        void operator()(const BackdateStep& s) {
            Replica& r = sim.replica_at(s.replica, line);
            if (r.store().empty()) {
                throw ScenarioRuntimeError(line, "cannot backdate from an empty store");
            }
            std::vector<EventId> preds;
            if (s.depth) {
                auto anchor = r.store().sources_at_depth(*s.depth);
                preds.assign(anchor.begin(), anchor.end());
            } else {
                for (const auto& label : s.pred_labels) {
                    EventId id = sim.resolve_label(label, line);
                    if (!r.store().contains(id)) {
                        throw ScenarioRuntimeError(
                            line, "backdate cites '" + label + "' which '" + s.replica.name +
                                      "' has not stored");
                    }
                    preds.push_back(id);
                }
            }
            Operation op = s.op;
            if (auto* epoch = std::get_if<EpochOp>(&op)) epoch->seq = r.chain().next_seq();
            Event event = make_event(r.id(), std::move(op), std::move(preds));
            EventId id = r.ingest_local(event);
            sim.registry_.emplace_back(id, event);
            sim.bind_label(s.label, id);
            sim.log_step(trace, line, "backdate " + op_summary(event) + " -> " + short_hex(id));
        }

        void operator()(const DeliverStep& s) {
            sim.replica_at(s.from, line);
            sim.replica_at(s.to, line);
            if (sim.blocked(s.from, s.to)) {
                sim.log_step(trace, line,
                             "deliver " + s.from.name + " -> " + s.to.name + " blocked");
                return;
            }
            std::size_t moved = 0;
            if (s.all) {
                moved = sim.deliver_new(s.from, s.to);
            } else {
                Replica& src = sim.replicas_.at(s.from);
                Replica& dst = sim.replicas_.at(s.to);
                auto& sent = sim.sent_[{s.from, s.to}];
                for (const auto& label : s.labels) {
                    EventId id = sim.resolve_label(label, line);
                    if (!src.store().contains(id)) {
                        throw ScenarioRuntimeError(line, "'" + s.from.name +
                                                             "' does not hold event '" + label +
                                                             "'");
                    }
                    if (!sent.insert(id).second) continue;
                    dst.deliver(src.store().get(id), id);
                    ++moved;
                }
            }
            bool emitted = sim.maybe_auto_epochs();
            sim.log_step(trace, line,
                         "deliver " + s.from.name + " -> " + s.to.name + " (" +
                             std::to_string(moved) + " events" +
                             (emitted ? ", epoch emitted" : "") + ")");
        }

        void operator()(const SyncStep&) {
            std::size_t moved = 0;
            bool progressed = true;
            while (progressed) {
                progressed = false;
                for (const auto& from : sim.scenario_.replicas) {
                    for (const auto& to : sim.scenario_.replicas) {
                        if (from == to || sim.blocked(from, to)) continue;
                        std::size_t n = sim.deliver_new(from, to);
                        moved += n;
                        progressed |= n > 0;
                    }
                }
                progressed |= sim.maybe_auto_epochs();
            }
            sim.log_step(trace, line, "sync (" + std::to_string(moved) + " events)");
        }

        void operator()(const PartitionStep& s) {
            std::map<UserId, int> groups;
            int next = 1;
            for (const auto& group : s.groups) {
                for (const auto& member : group) {
                    if (groups.count(member)) {
                        throw ScenarioRuntimeError(
                            line, "replica '" + member.name + "' listed in two partition groups");
                    }
                    groups[member] = next;
                }
                ++next;
            }
            for (const auto& id : sim.scenario_.replicas) {
                if (!groups.count(id)) {
                    throw ScenarioRuntimeError(
                        line, "partition must mention every replica ('" + id.name + "' missing)");
                }
            }
            sim.group_of_ = std::move(groups);
            sim.log_step(trace, line, "partition");
        }

        void operator()(const HealStep&) {
            for (auto& [id, group] : sim.group_of_) group = 0;
            sim.log_step(trace, line, "heal");
        }

        void operator()(const EmitEpochStep& s) {
            Replica& r = sim.replica_at(s.node, line);
            if (r.store().empty()) {
                throw ScenarioRuntimeError(line, "epoch from an empty store");
            }
            Event epoch = emit_epoch(r.store(), s.node, r.chain());
            EventId id = r.ingest_local(epoch);
            sim.registry_.emplace_back(id, epoch);
            sim.bind_label(s.label, id);
            sim.log_step(trace, line, "epoch " + op_summary(epoch) + " -> " + short_hex(id));
        }

        void operator()(const ExpectRoleStep& s) {
            Replica& r = sim.replica_at(s.replica, line);
            MaterialisedView view = r.materialised_view();
            std::string description = "expect " + s.replica.name + " role " + s.user.name + " " +
                                      std::string(role_name(s.role));
            auto it = view.state.roles.find(s.user);
            if (it == view.state.roles.end()) {
                sim.record(trace, line, description, false, s.user.name + " has not joined");
            } else if (it->second != s.role) {
                sim.record(trace, line, description, false,
                           s.user.name + " is " + std::string(role_name(it->second)));
            } else {
                sim.record(trace, line, description, true, "");
            }
        }

        void operator()(const ExpectVerdictStep& s) {
            Replica& r = sim.replica_at(s.replica, line);
            EventId id = sim.resolve_label(s.label, line);
            std::string description = std::string(s.applied ? "expect-applied " : "expect-rejected ") +
                                      s.replica.name + " " + s.label;
            if (!r.store().contains(id)) {
                sim.record(trace, line, description, false, "event not present at replica");
                return;
            }
            bool rejected = r.materialised_view().state.rejected.count(id) != 0;
            bool ok = s.applied ? !rejected : rejected;
            sim.record(trace, line, description, ok,
                       ok ? "" : (rejected ? "event was rejected" : "event was applied"));
        }

        void operator()(const ExpectLayerStep& s) {
            Replica& r = sim.replica_at(s.replica, line);
            EventId id = sim.resolve_label(s.label, line);
            std::string want = s.layer ? std::to_string(*s.layer) : "pending";
            std::string description =
                "expect-layer " + s.replica.name + " " + s.label + " " + want;
            if (!r.store().contains(id)) {
                sim.record(trace, line, description, false, "event not present at replica");
                return;
            }
            EpochLayering layering = layer_events(r.store(), r.chain().accepted);
            std::size_t got = layering.layer_of(id);
            std::size_t expected = s.layer ? *s.layer - 1 : kPendingLayer;
            std::string got_name =
                got == kPendingLayer ? "pending" : std::to_string(got + 1);
            sim.record(trace, line, description, got == expected,
                       got == expected ? "" : "event is in layer " + got_name);
        }

        void operator()(const ExpectEvidenceStep& s) {
            std::string description = std::string(s.expect_present ? "expect-evidence"
                                                                   : "expect-no-evidence");
            if (s.sender) description += " " + s.sender->name;
            if (s.at) description += " at " + s.at->name;

            auto matches = [&](const Replica& r) {
                auto all = r.backdate_evidence();
                all.insert(all.end(), r.chain().misbehavior.begin(), r.chain().misbehavior.end());
                return std::any_of(all.begin(), all.end(), [&](const BackdateEvidence& e) {
                    return !s.sender || e.sender == *s.sender;
                });
            };
            bool found = false;
            if (s.at) {
                found = matches(sim.replica_at(*s.at, line));
            } else {
                for (const auto& [id, r] : sim.replicas_) found |= matches(r);
            }
            bool ok = found == s.expect_present;
            sim.record(trace, line, description, ok,
                       ok ? "" : (found ? "evidence present" : "no evidence recorded"));
        }

        void operator()(const ExpectActiveNodeStep& s) {
            Replica& r = sim.replica_at(s.replica, line);
            auto active = r.chain().active_node(r.config());
            std::string want = s.node ? s.node->name : "none";
            std::string description =
                "expect-active-node " + s.replica.name + " " + want;
            bool ok = active == s.node;
            sim.record(trace, line, description, ok,
                       ok ? "" : "active node is " + (active ? active->name : "none"));
        }

        void operator()(const ExpectConvergedStep&) {
            std::string description = "expect-converged";
            std::optional<std::string> reference;
            std::optional<UserId> reference_id;
            for (const auto& [id, r] : sim.replicas_) {
                std::string key = std::to_string(r.store().size()) + "\n" + view_text(r);
                if (!reference) {
                    reference = key;
                    reference_id = id;
                } else if (*reference != key) {
                    sim.record(trace, line, description, false,
                               "replicas '" + reference_id->name + "' and '" + id.name +
                                   "' differ");
                    return;
                }
            }
            sim.record(trace, line, description, true, "");
        }
    };
    std::visit(Visitor{*this, trace, line}, step.body);
}

}  // namespace

bool Trace::all_passed() const {
    return std::all_of(assertions.begin(), assertions.end(),
                       [](const AssertionResult& a) { return a.passed; });
}

std::string Trace::render() const {
    std::string out;
    out += "strategy " + std::string(strategy_name(strategy)) + "\n";
    out += "seed " + std::to_string(seed) + "\n";
    for (const auto& entry : step_log) out += entry + "\n";
    for (const auto& [id, summary] : finals) {
        out += "final " + id.name + "\n";
        out += "  events " + std::to_string(summary.event_count);
        out += " buffered " + std::to_string(summary.buffered) + "\n";
        out += "  finalized-prefix " + std::to_string(summary.finalized_prefix_len) + "\n";
        out += "  active-node " + (summary.active_node ? summary.active_node->name : "none") + "\n";
        for (const auto& [user, role] : summary.state.roles) {
            out += "  role " + user.name + " " + std::string(role_name(role)) + "\n";
        }
        for (const auto& id2 : summary.state.rejected) {
            out += "  rejected " + id2.hex() + "\n";
        }
        for (const auto& e : summary.backdate_evidence) {
            out += "  BACKDATE " + e.sender.name + " " + e.event_a.hex() + " " + e.event_b.hex() +
                   "\n";
        }
        for (const auto& e : summary.misbehavior) {
            out += "  MISBEHAVIOR " + e.sender.name + " " + e.event_a.hex() + " " +
                   e.event_b.hex() + "\n";
        }
        for (const auto& d : summary.drops) {
            out += "  dropped " + d.claimed_id.hex() + " " +
                   std::string(drop_reason_name(d.reason)) + "\n";
        }
    }
    out += std::string("result ") + (all_passed() ? "PASS" : "FAIL") + "\n";
    return out;
}

Trace run(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

RunResult run_full(const Scenario& scenario) {
    Simulation sim(scenario);
    RunResult out;
    out.trace = sim.run();
    out.replicas = sim.take_replicas();
    return out;
}

std::vector<PermutationOutcome> permute_deliveries(const Scenario& scenario, std::size_t n,
                                                   std::uint64_t seed) {
    bool seen_expect = false;
    for (const auto& step : scenario.script) {
        if (is_expect_step(step)) {
            seen_expect = true;
        } else if (seen_expect) {
            throw ScenarioRuntimeError(step.line,
                                       "permutations require expectations at the end of the script");
        }
    }

    Simulation canonical(scenario);
    canonical.run();
    const auto& registry = canonical.registry();

    std::vector<PermutationOutcome> outcomes;
    outcomes.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (k + 1));
        std::vector<std::size_t> base(registry.size());
        for (std::size_t i = 0; i < base.size(); ++i) base[i] = i;

        PermutationOutcome outcome;
        for (const auto& id : scenario.replicas) {
            std::vector<std::size_t> schedule = base;
            if (k > 0) {
                // Fisher-Yates with rng() directly, so schedules are
                // reproducible across standard libraries.
                for (std::size_t i = schedule.size(); i > 1; --i) {
                    std::swap(schedule[i - 1], schedule[rng() % i]);
                }
                std::size_t dups = schedule.size() / 4 + 1;
                for (std::size_t d = 0; d < dups && !base.empty(); ++d) {
                    schedule.push_back(base[rng() % base.size()]);
                }
            }
            Replica replica(id, scenario.finality, scenario.strategy);
            for (std::size_t idx : schedule) {
                replica.deliver(registry[idx].second, registry[idx].first);
            }
            if (replica.buffered_count() != 0) {
                throw std::logic_error("permute_deliveries: buffer not drained");
            }
            PermutationOutcome::ReplicaView view;
            for (const auto& eid : replica.chain().accepted) view.chain_key += eid.hex();
            view.view_text = view_text(replica);
            outcome.replicas.emplace(id, std::move(view));
        }
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

std::optional<std::string> find_divergence(const std::vector<PermutationOutcome>& outcomes) {
    std::map<std::string, std::pair<std::string, std::size_t>> views;  // chain -> (view, perm)
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        for (const auto& [id, view] : outcomes[k].replicas) {
            auto [it, inserted] =
                views.emplace(view.chain_key, std::make_pair(view.view_text, k));
            if (!inserted && it->second.first != view.view_text) {
                return "replica " + id.name + " in permutation " + std::to_string(k) +
                       " diverges from permutation " + std::to_string(it->second.second);
            }
        }
    }
    return std::nullopt;
}

}  // namespace era
