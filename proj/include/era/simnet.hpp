#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "era/replica.hpp"
#include "era/scenario.hpp"

namespace era {

/// Scenario misuse discovered while executing (not a failed expectation):
/// an op at a replica that has not seen the genesis, a backdate citing
/// unseen events, an epoch from a node without a replica.
class ScenarioRuntimeError : public std::runtime_error {
public:
    ScenarioRuntimeError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

struct AssertionResult {
    int line = 0;
    std::string description;
    bool passed = false;
    std::string detail;  // populated on failure
};

struct ReplicaSummary {
    std::size_t event_count = 0;
    std::size_t buffered = 0;
    GroupState state;
    std::size_t finalized_prefix_len = 0;
    std::optional<UserId> active_node;
    std::vector<BackdateEvidence> backdate_evidence;
    std::vector<BackdateEvidence> misbehavior;
    std::vector<DropDiagnostic> drops;
};

/// Deterministic record of one scenario execution. Re-running the same
/// (scenario, seed) reproduces the rendered trace byte for byte.
struct Trace {
    Strategy strategy = Strategy::Era;
    std::uint64_t seed = 0;
    std::vector<std::string> step_log;  // one entry per executed step, with digests
    std::vector<AssertionResult> assertions;
    std::map<UserId, ReplicaSummary> finals;
    std::map<std::string, EventId> labels;

    bool all_passed() const;
    std::string render() const;
};

/// Executes a scenario script in order. Deliveries respect per-link FIFO
/// queues and the current partition; expectation steps are evaluated
/// against the named replica and recorded, never thrown.
Trace run(const Scenario& scenario);

/// Like run, but keeps the final replicas for report rendering, DAG
/// export and the finality checker.
struct RunResult {
    Trace trace;
    std::map<UserId, Replica> replicas;
};

RunResult run_full(const Scenario& scenario);

/// Final view of one replica after a permuted full delivery.
struct PermutationOutcome {
    struct ReplicaView {
        std::string chain_key;  // accepted epoch ids, in order
        std::string view_text;  // roles + rejected + finalized prefix
    };
    std::map<UserId, ReplicaView> replicas;
};

/// Runs the scenario once to collect its event set, then delivers that set
/// to fresh replicas n times under seeded shuffles with injected
/// duplicates (permutation 0 is the creation order). Buffering in the
/// replica turns any arrival order into a causal ingest order.
/// The scenario must keep expectation steps at the end of the script.
std::vector<PermutationOutcome> permute_deliveries(const Scenario& scenario, std::size_t n,
                                                   std::uint64_t seed);

/// Convergence check over permutation outcomes: replicas that ended with
/// the same accepted chain must expose identical views. Returns a
/// description of the first divergence, or nullopt when converged.
std::optional<std::string> find_divergence(const std::vector<PermutationOutcome>& outcomes);

}  // namespace era
