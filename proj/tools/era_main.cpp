#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "era/dot.hpp"
#include "era/report.hpp"
#include "era/scenario.hpp"
#include "era/simnet.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertionFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct RunOptions {
    std::string scenario_path;
    std::string strategy_override;
    std::optional<std::uint64_t> seed_override;
    bool json = false;
    std::size_t permutations = 0;
    std::string order_replica;
};

era::Scenario load_with_overrides(const RunOptions& opts) {
    era::Scenario scenario = era::load_scenario(opts.scenario_path);
    if (!opts.strategy_override.empty()) {
        auto s = era::strategy_from_name(opts.strategy_override);
        if (!s) {
            throw era::ScenarioParseError(0, 0,
                                          "unknown strategy '" + opts.strategy_override + "'");
        }
        scenario.strategy = *s;
    }
    if (opts.seed_override) scenario.seed = *opts.seed_override;
    return scenario;
}

int cmd_run(const RunOptions& opts) {
    era::Scenario scenario = load_with_overrides(opts);
    era::RunResult result = era::run_full(scenario);

    if (!opts.order_replica.empty()) {
        auto it = result.replicas.find(era::UserId{opts.order_replica});
        if (it == result.replicas.end()) {
            std::cerr << "error: unknown replica '" << opts.order_replica << "'\n";
            return kExitUsage;
        }
        era::MaterialisedView view = it->second.materialised_view();
        std::cout << era::format_order_dump(it->second.store(), view.order, view.state);
        return result.trace.all_passed() ? kExitOk : kExitAssertionFailed;
    }

    if (opts.json) {
        std::cout << era::format_report_json(opts.scenario_path, result.trace);
    } else {
        std::cout << era::format_report(opts.scenario_path, result.trace);
    }

    bool converged = true;
    if (opts.permutations > 0) {
        auto outcomes = era::permute_deliveries(scenario, opts.permutations, scenario.seed);
        auto divergence = era::find_divergence(outcomes);
        converged = !divergence.has_value();
        std::cout << "permutations " << opts.permutations << " "
                  << (converged ? "converged" : "DIVERGED: " + *divergence) << "\n";
    }
    return result.trace.all_passed() && converged ? kExitOk : kExitAssertionFailed;
}

int cmd_dot(const std::string& path, const std::string& replica_name) {
    era::Scenario scenario = era::load_scenario(path);
    era::RunResult result = era::run_full(scenario);
    auto it = result.replicas.find(era::UserId{replica_name});
    if (it == result.replicas.end()) {
        std::cerr << "error: unknown replica '" << replica_name << "'\n";
        return kExitUsage;
    }
    era::MaterialisedView view = it->second.materialised_view();
    std::cout << era::render_dot(it->second.store(), it->second.chain().accepted, view.state);
    return kExitOk;
}

int cmd_check_final(const std::string& path, const std::string& event_prefix,
                    const std::string& replica_name, std::vector<std::string> users,
                    std::optional<std::size_t> depth) {
    era::Scenario scenario = era::load_scenario(path);
    era::RunResult result = era::run_full(scenario);

    era::UserId replica_id{replica_name.empty() ? scenario.replicas.front().name : replica_name};
    auto it = result.replicas.find(replica_id);
    if (it == result.replicas.end()) {
        std::cerr << "error: unknown replica '" << replica_id.name << "'\n";
        return kExitUsage;
    }
    const era::Replica& replica = it->second;

    std::vector<era::EventId> matches;
    for (const auto& id : replica.store().ingest_order()) {
        if (id.hex().rfind(event_prefix, 0) == 0) matches.push_back(id);
    }
    if (matches.empty()) {
        std::cerr << "error: no event matches prefix '" << event_prefix << "'\n";
        return kExitUsage;
    }
    if (matches.size() > 1) {
        std::cerr << "error: prefix '" << event_prefix << "' is ambiguous (" << matches.size()
                  << " events)\n";
        return kExitUsage;
    }
    era::EventId target = matches.front();

    std::vector<era::UserId> candidate_users;
    if (users.empty()) {
        candidate_users = scenario.replicas;
    } else {
        for (auto& name : users) candidate_users.push_back(era::UserId{std::move(name)});
    }
    std::size_t max_depth = 0;
    for (const auto& id : replica.store().ingest_order()) {
        max_depth = std::max(max_depth, replica.store().depth(id));
    }
    if (depth) max_depth = std::min(max_depth, *depth);

    auto candidates = era::enumerate_candidates(candidate_users, replica.config(), max_depth,
                                                replica.chain().next_seq());
    auto verdict = era::check_final_bounded(replica.store(), replica.chain(), replica.config(),
                                            replica.strategy(), target, candidates);

    std::cout << "event " << target.hex() << " " << era::op_summary(replica.store().get(target))
              << "\n";
    if (verdict.candidates_checked == 0) {
        std::cout << "warning: zero candidates; vacuously final\n";
    }
    if (verdict.final_within_bound) {
        std::cout << "final within bound (" << verdict.candidates_checked << " candidates)\n";
    } else {
        const auto& [event, id] = *verdict.counterexample;
        std::cout << "rollback candidate: " << era::op_summary(event) << " id " << id.hex()
                  << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ERA group-management CRDT simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Execute a scenario and report the outcome");
    run_cmd->add_option("file", run_opts.scenario_path, "scenario file")->required();
    run_cmd->add_option("--strategy", run_opts.strategy_override, "era|seniority|eventhash");
    run_cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { run_opts.seed_override = v; }, "seed override");
    run_cmd->add_flag("--json", run_opts.json, "structured report");
    run_cmd->add_option("--permutations", run_opts.permutations,
                        "run N permuted deliveries and check convergence");
    run_cmd->add_option("--order", run_opts.order_replica,
                        "print the execution-order dump for a replica instead of the report");

    std::string dot_path;
    std::string dot_replica;
    auto* dot_cmd = app.add_subcommand("dot", "Export a replica's DAG as Graphviz");
    dot_cmd->add_option("file", dot_path, "scenario file")->required();
    dot_cmd->add_option("--replica", dot_replica, "replica to export")->required();

    std::string cf_path;
    std::string cf_event;
    std::string cf_replica;
    std::vector<std::string> cf_users;
    std::optional<std::size_t> cf_depth;
    auto* cf_cmd = app.add_subcommand("check-final", "Bounded finality check for one event");
    cf_cmd->add_option("file", cf_path, "scenario file")->required();
    cf_cmd->add_option("--event", cf_event, "event id hex prefix")->required();
    cf_cmd->add_option("--replica", cf_replica, "replica whose view to check (default: first)");
    cf_cmd->add_option("--users", cf_users, "candidate senders (default: all replicas)");
    cf_cmd->add_option_function<std::size_t>(
        "--depth", [&](std::size_t v) { cf_depth = v; }, "max candidate anchor depth");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts);
        if (dot_cmd->parsed()) return cmd_dot(dot_path, dot_replica);
        if (cf_cmd->parsed()) {
            return cmd_check_final(cf_path, cf_event, cf_replica, cf_users, cf_depth);
        }
    } catch (const era::ScenarioParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const era::ScenarioRuntimeError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
