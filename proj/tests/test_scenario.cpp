#include <doctest.h>

#include "era/scenario.hpp"

using namespace era;

TEST_CASE("a full scenario parses into directives and steps") {
    Scenario s = parse_scenario(
        "# duel setup\n"
        "replicas a b f1\n"
        "finality-nodes f1 f2\n"
        "pending-threshold 3\n"
        "demote-triggers on\n"
        "strategy seniority\n"
        "seed 99\n"
        "\n"
        "op a join as ja\n"
        "op a promote b admin\n"
        "op b write hello\n"
        "backdate a demote b reader depth=2 as bd\n"
        "deliver a b all\n"
        "deliver a b ja,bd\n"
        "partition a|b,f1\n"
        "heal\n"
        "epoch f1 as e1\n"
        "sync\n"
        "expect a role b reader\n"
        "expect-rejected a bd\n"
        "expect-layer a ja 1\n"
        "expect-layer a bd pending\n"
        "expect-evidence a at b\n"
        "expect-no-evidence f1\n"
        "expect-active-node a f1\n"
        "expect-converged\n");

    CHECK(s.replicas == std::vector<UserId>{UserId{"a"}, UserId{"b"}, UserId{"f1"}});
    CHECK(s.finality.node_list == std::vector<UserId>{UserId{"f1"}, UserId{"f2"}});
    CHECK(s.finality.pending_threshold == 3);
    CHECK(s.finality.demote_triggers);
    CHECK(s.auto_epochs);
    CHECK(s.strategy == Strategy::Seniority);
    CHECK(s.seed == 99);
    REQUIRE(s.script.size() == 18);

    const auto& op = std::get<OpStep>(s.script[0].body);
    CHECK(op.replica == UserId{"a"});
    CHECK(op.label == "ja");
    CHECK(s.script[0].line == 9);

    const auto& bd = std::get<BackdateStep>(s.script[3].body);
    CHECK(bd.depth == 2);
    CHECK(bd.label == "bd");
    const auto* demote = std::get_if<DemoteOp>(&bd.op);
    REQUIRE(demote != nullptr);
    CHECK(demote->target == UserId{"b"});
    CHECK(demote->role == Role::Reader);

    const auto& filtered = std::get<DeliverStep>(s.script[5].body);
    CHECK_FALSE(filtered.all);
    CHECK(filtered.labels == std::vector<std::string>{"ja", "bd"});

    const auto& part = std::get<PartitionStep>(s.script[6].body);
    REQUIRE(part.groups.size() == 2);
    CHECK(part.groups[1] == std::vector<UserId>{UserId{"b"}, UserId{"f1"}});

    const auto& layer = std::get<ExpectLayerStep>(s.script[12].body);
    CHECK(layer.layer == 1);
    CHECK(std::get<ExpectLayerStep>(s.script[13].body).layer == std::nullopt);

    const auto& evidence = std::get<ExpectEvidenceStep>(s.script[14].body);
    CHECK(evidence.sender == UserId{"a"});
    CHECK(evidence.at == UserId{"b"});
    CHECK(evidence.expect_present);
    CHECK_FALSE(std::get<ExpectEvidenceStep>(s.script[15].body).expect_present);
}

TEST_CASE("write payload is optional") {
    Scenario s = parse_scenario("replicas a\nop a join\nop a write\nop a write msg as w\n");
    CHECK(std::get<WriteOp>(std::get<OpStep>(s.script[1].body).op).payload.empty());
    CHECK(std::get<WriteOp>(std::get<OpStep>(s.script[2].body).op).payload == "msg");
}

TEST_CASE("backdated preds can cite labels") {
    Scenario s = parse_scenario(
        "replicas a\n"
        "op a join as g\n"
        "op a write x as w1\n"
        "backdate a write y preds=g as w2\n");
    const auto& bd = std::get<BackdateStep>(s.script[2].body);
    CHECK_FALSE(bd.depth.has_value());
    CHECK(bd.pred_labels == std::vector<std::string>{"g"});
}

TEST_CASE("parse errors carry line and column") {
    auto line_col = [](const std::string& text) {
        try {
            parse_scenario(text);
        } catch (const ScenarioParseError& e) {
            return std::pair{e.line(), e.column()};
        }
        return std::pair{-1, -1};
    };

    CHECK(line_col("replicas a\nop a fly\n") == std::pair{2, 6});
    CHECK(line_col("replicas a\nop b join\n") == std::pair{2, 4});
    CHECK(line_col("bogus\n") == std::pair{1, 1});
    CHECK(line_col("replicas a\nop a promote b emperor\n") == std::pair{2, 16});
    CHECK(line_col("replicas a\nstrategy vibes\n") == std::pair{2, 10});
    CHECK(line_col("replicas a a\n") == std::pair{1, 1});
    CHECK(line_col("replicas a\nop a join\nop a join trailing\n") == std::pair{3, 11});
}

TEST_CASE("epochs cannot be sent as plain ops") {
    CHECK_THROWS_AS(parse_scenario("replicas f1\nop f1 epoch\n"), ScenarioParseError);
    // but a misbehaving finality node may backdate one
    Scenario s = parse_scenario("replicas f1\nop f1 join\nbackdate f1 epoch depth=0\n");
    CHECK(std::holds_alternative<EpochOp>(std::get<BackdateStep>(s.script[1].body).op));
}

TEST_CASE("unknown labels are rejected at parse time") {
    CHECK_THROWS_AS(parse_scenario("replicas a b\nop a join\ndeliver a b nope\n"),
                    ScenarioParseError);
    CHECK_THROWS_AS(parse_scenario("replicas a\nop a join\nbackdate a write x preds=nope\n"),
                    ScenarioParseError);
    CHECK_THROWS_AS(parse_scenario("replicas a\nop a join\nexpect-rejected a nope\n"),
                    ScenarioParseError);
}

TEST_CASE("a scenario without replicas is rejected") {
    CHECK_THROWS_AS(parse_scenario("# nothing\n"), ScenarioParseError);
    CHECK_THROWS_AS(parse_scenario("seed 4\n"), ScenarioParseError);
}

TEST_CASE("missing files surface as parse errors") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.scn"), ScenarioParseError);
}

TEST_CASE("pending-threshold zero is rejected") {
    CHECK_THROWS_AS(parse_scenario("replicas a\npending-threshold 0\n"), ScenarioParseError);
}
