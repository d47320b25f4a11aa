#include <doctest.h>

#include <filesystem>

#include "era/encoding.hpp"
#include "era/simnet.hpp"
#include "oracles.hpp"

using namespace era;

namespace {

std::string fixture(const std::string& name) {
    return std::string(ERA_FIXTURES_DIR) + "/paper/" + name;
}

const char* kCanonicalFixtures[] = {
    "duelling_admins.scn",   "equal_demote.scn",       "concurrent_demote.scn",
    "self_demote.scn",       "self_demote_era.scn",    "epoch_onion.scn",
    "epoch_concurrent.scn",  "duelling_admins_era.scn", "backdate_detectable.scn",
    "backdate_undetectable.scn",
};

}  // namespace

TEST_CASE("every shipped fixture runs and passes its expectations") {
    for (const char* name : kCanonicalFixtures) {
        CAPTURE(name);
        Scenario scenario = load_scenario(fixture(name));
        Trace trace = run(scenario);
        for (const auto& a : trace.assertions) {
            CAPTURE(a.description);
            CAPTURE(a.detail);
            CHECK(a.passed);
        }
        CHECK(trace.all_passed());
    }
}

TEST_CASE("traces are reproducible byte for byte") {
    for (const char* name : {"self_demote_era.scn", "epoch_concurrent.scn"}) {
        Scenario scenario = load_scenario(fixture(name));
        CHECK(run(scenario).render() == run(scenario).render());
    }
}

TEST_CASE("partitions block deliveries until heal") {
    Scenario s = parse_scenario(
        "replicas a b\n"
        "op a join as g\n"
        "partition a|b\n"
        "deliver a b all\n"
        "heal\n"
        "deliver a b all\n");
    RunResult result = run_full(s);
    CHECK(result.replicas.at(UserId{"b"}).store().size() == 1);
    CHECK(result.trace.step_log[2].find("blocked") != std::string::npos);
}

TEST_CASE("sync reaches quiescence across every link") {
    Scenario s = parse_scenario(
        "replicas a b c\n"
        "op a join\n"
        "deliver a b all\n"
        "op b join\n"
        "op a write x\n"
        "sync\n"
        "expect-converged\n");
    RunResult result = run_full(s);
    CHECK(result.trace.all_passed());
    for (const auto& [id, replica] : result.replicas) {
        CHECK(replica.store().size() == 3);
        CHECK(replica.buffered_count() == 0);
    }
}

TEST_CASE("label-filtered delivery buffers until the gap closes") {
    Scenario s = parse_scenario(
        "replicas a b\n"
        "op a join as g\n"
        "op a write one as w1\n"
        "op a write two as w2\n"
        "deliver a b w2\n"     // child first: buffered
        "deliver a b g,w1\n"); // closes the causal gap
    RunResult result = run_full(s);
    const Replica& b = result.replicas.at(UserId{"b"});
    CHECK(b.store().size() == 3);
    CHECK(b.buffered_count() == 0);
}

TEST_CASE("ops at a replica that has not seen genesis are scenario errors") {
    Scenario s = parse_scenario(
        "replicas a b\n"
        "op a join\n"
        "op b join\n");  // b has no store yet
    CHECK_THROWS_AS(run(s), ScenarioRuntimeError);

    Scenario s2 = parse_scenario("replicas a\nop a write late\n");
    CHECK_THROWS_AS(run(s2), ScenarioRuntimeError);
}

TEST_CASE("backdating cannot cite events the replica has not stored") {
    Scenario s = parse_scenario(
        "replicas a b\n"
        "op a join as g\n"
        "deliver a b all\n"
        "op b join as jb\n"
        "backdate a write x preds=jb\n");  // jb never delivered back to a
    CHECK_THROWS_AS(run(s), ScenarioRuntimeError);
}

TEST_CASE("auto epochs fire on the pending threshold") {
    Scenario s = parse_scenario(
        "replicas a f1\n"
        "finality-nodes f1\n"
        "pending-threshold 3\n"
        "op a join\n"
        "op a write 1\n"
        "deliver a f1 all\n"   // two pending events: below threshold
        "op a write 2\n"
        "deliver a f1 all\n"); // three pending: epoch fires
    RunResult result = run_full(s);
    const Replica& f1 = result.replicas.at(UserId{"f1"});
    REQUIRE(f1.chain().accepted.size() == 1);
    CHECK(result.trace.step_log[2].find("epoch emitted") == std::string::npos);
    CHECK(result.trace.step_log[4].find("epoch emitted") != std::string::npos);
    // the epoch covers everything, so nothing stays pending at f1
    EpochLayering layering = layer_events(f1.store(), f1.chain().accepted);
    CHECK(layering.pending.empty());
}

TEST_CASE("auto epochs fire on demand for pending demotions") {
    Scenario s = parse_scenario(
        "replicas a b f1\n"
        "finality-nodes f1\n"
        "pending-threshold 100\n"
        "demote-triggers on\n"
        "op a join\n"
        "deliver a b all\n"
        "op b join\n"
        "deliver b a all\n"
        "deliver a f1 all\n"
        "op a demote b reader\n"
        "deliver a f1 all\n");
    RunResult result = run_full(s);
    CHECK(result.replicas.at(UserId{"f1"}).chain().accepted.size() == 1);
}

TEST_CASE("the era duel picks exactly one winner, stable across reruns") {
    Scenario scenario = load_scenario(fixture("duelling_admins_era.scn"));
    RunResult first = run_full(scenario);
    RunResult second = run_full(scenario);
    REQUIRE(first.trace.all_passed());

    auto rejected_of = [](const RunResult& r, const char* name) {
        return r.replicas.at(UserId{name}).materialised_view().state.rejected;
    };
    auto rejected = rejected_of(first, "a");
    CHECK(rejected.size() == 1);  // exactly one demote loses
    CHECK(rejected == rejected_of(first, "b"));
    CHECK(rejected == rejected_of(second, "a"));

    const auto& store = first.replicas.at(UserId{"a"}).store();
    CHECK(is_demote(store.get(*rejected.begin()).op));
}

TEST_CASE("permutations of the duel fixtures converge") {
    for (const char* name : {"duelling_admins.scn", "duelling_admins_era.scn"}) {
        CAPTURE(name);
        Scenario scenario = load_scenario(fixture(name));
        auto outcomes = permute_deliveries(scenario, 50, 7);
        REQUIRE(outcomes.size() == 50);
        CHECK_FALSE(find_divergence(outcomes).has_value());
    }
}

TEST_CASE("permutations refuse mid-script expectations") {
    Scenario s = parse_scenario(
        "replicas a\n"
        "op a join\n"
        "expect a role a admin\n"
        "op a write x\n");
    CHECK_THROWS_AS(permute_deliveries(s, 2, 1), ScenarioRuntimeError);
}

TEST_CASE("find_divergence spots a planted mismatch") {
    PermutationOutcome x, y;
    x.replicas[UserId{"a"}] = {"chain", "view-1"};
    y.replicas[UserId{"a"}] = {"chain", "view-2"};
    CHECK_FALSE(find_divergence({x, x}).has_value());
    CHECK(find_divergence({x, y}).has_value());
}
