#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "era/finality.hpp"
#include "era/ordering.hpp"
#include "era/types.hpp"

namespace era {

/// Script steps. Every step carries the 1-based source line for error and
/// assertion reporting.

struct OpStep {
    UserId replica;
    Operation op;
    std::optional<std::string> label;
};

/// An operation whose declared preds are attacker-chosen: either the
/// sources of the replica's store truncated at a DAG depth, or explicitly
/// named events. Either way the replica can only cite events it has seen.
/// For epoch ops the seq is filled from the replica's chain at execution.
struct BackdateStep {
    UserId replica;
    Operation op;
    std::optional<std::size_t> depth;
    std::vector<std::string> pred_labels;
    std::optional<std::string> label;
};

struct DeliverStep {
    UserId from;
    UserId to;
    bool all = true;
    std::vector<std::string> labels;
};

/// Delivers everything to everyone (unblocked links) until quiescent.
struct SyncStep {};

struct PartitionStep {
    std::vector<std::vector<UserId>> groups;
};

struct HealStep {};

struct EmitEpochStep {
    UserId node;
    std::optional<std::string> label;
};

struct ExpectRoleStep {
    UserId replica;
    UserId user;
    Role role;
};

struct ExpectVerdictStep {
    UserId replica;
    std::string label;
    bool applied = true;  // false: expect rejected
};

struct ExpectLayerStep {
    UserId replica;
    std::string label;
    std::optional<std::size_t> layer;  // 1-based; nullopt = pending
};

struct ExpectEvidenceStep {
    std::optional<UserId> sender;   // nullopt = any sender
    std::optional<UserId> at;       // nullopt = any replica
    bool expect_present = true;
};

struct ExpectActiveNodeStep {
    UserId replica;
    std::optional<UserId> node;  // nullopt = "none" (chain frozen)
};

struct ExpectConvergedStep {};

using StepBody =
    std::variant<OpStep, BackdateStep, DeliverStep, SyncStep, PartitionStep, HealStep,
                 EmitEpochStep, ExpectRoleStep, ExpectVerdictStep, ExpectLayerStep,
                 ExpectEvidenceStep, ExpectActiveNodeStep, ExpectConvergedStep>;

struct Step {
    int line = 0;
    StepBody body;
};

bool is_expect_step(const Step& step);

/// A declarative multi-replica schedule: roster, finality configuration,
/// ordering strategy, seed and script.
struct Scenario {
    std::vector<UserId> replicas;
    FinalityConfig finality;
    Strategy strategy = Strategy::Era;
    std::uint64_t seed = 0;
    /// Auto epoch emission after deliveries; enabled by the
    /// pending-threshold / demote-triggers directives.
    bool auto_epochs = false;
    std::vector<Step> script;
};

class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(int line, int column, const std::string& message);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses the line-oriented scenario grammar ('#' starts a comment).
/// See README for the full grammar.
Scenario parse_scenario(const std::string& text);

/// Reads and parses a scenario file; file errors surface as
/// ScenarioParseError on line 0.
Scenario load_scenario(const std::string& path);

}  // namespace era
