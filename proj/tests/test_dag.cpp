#include <doctest.h>

#include <random>

#include "era/dag.hpp"
#include "era/encoding.hpp"
#include "oracles.hpp"

using namespace era;
using namespace era::testing;

namespace {

/// The detectable-backdating DAG: a1 <- b1 <- a2, plus a3 anchored at a1.
struct BackdateFixture {
    DagStore store;
    EventId a1, b1, a2, a3;

    BackdateFixture(bool ingest_a3 = true) {
        a1 = put(store, ev("a", JoinOp{}));
        b1 = put(store, ev("b", JoinOp{}, {a1}));
        a2 = put(store, ev("a", WriteOp{"m2"}, {b1}));
        if (ingest_a3) a3 = put(store, ev("a", WriteOp{"m3"}, {a1}));
    }
};

}  // namespace

TEST_CASE("genesis-only store") {
    DagStore store;
    EventId g = put(store, ev("a", JoinOp{}));
    CHECK(store.sources() == std::set<EventId>{g});
    CHECK(store.ancestors(g) == std::set<EventId>{g});
    CHECK(store.genesis() == g);
    CHECK(store.depth(g) == 0);
}

TEST_CASE("re-ingest is an idempotent no-op") {
    DagStore store;
    Event genesis = ev("a", JoinOp{});
    EventId id = put(store, genesis);
    CHECK(store.ingest(genesis, id) == IngestResult::DuplicateId);
    CHECK(store.size() == 1);
    CHECK(ingest_stored(IngestResult::DuplicateId));
}

TEST_CASE("hash mismatch is rejected and the store is untouched") {
    DagStore store;
    put(store, ev("a", JoinOp{}));
    Event fake = ev("b", JoinOp{});
    EventId wrong = event_id(ev("c", JoinOp{}));
    CHECK(store.ingest(fake, wrong) == IngestResult::RejectedHashMismatch);
    CHECK(store.size() == 1);
}

TEST_CASE("only one parentless event is ever accepted, and it must be a join") {
    DagStore store;
    Event bad_genesis = ev("a", WriteOp{"x"});
    CHECK(store.ingest(bad_genesis, event_id(bad_genesis)) == IngestResult::RejectedRogueGenesis);

    put(store, ev("a", JoinOp{}));
    Event rogue = ev("b", JoinOp{});
    CHECK(store.ingest(rogue, event_id(rogue)) == IngestResult::RejectedRogueGenesis);
    CHECK(store.size() == 1);
}

TEST_CASE("missing predecessor is a caller bug") {
    DagStore store;
    put(store, ev("a", JoinOp{}));
    EventId ghost{};
    ghost.bytes[0] = 0xff;
    Event child = ev("a", WriteOp{"x"}, {ghost});
    CHECK_THROWS_AS(store.ingest(child, event_id(child)), std::logic_error);
}

TEST_CASE("backdating figure: sources, precedes, concurrency") {
    BackdateFixture f;
    CHECK(f.store.sources() == std::set<EventId>{std::min(f.a2, f.a3), std::max(f.a2, f.a3)});
    CHECK(f.store.precedes(f.a1, f.a2));
    CHECK(f.store.precedes(f.a1, f.a1));
    CHECK_FALSE(f.store.precedes(f.a3, f.a2));
    CHECK_FALSE(f.store.precedes(f.a2, f.a3));
    CHECK(f.store.concurrent(f.a2, f.a3));
    CHECK_FALSE(f.store.concurrent(f.a2, f.a2));
    CHECK(f.store.ancestors(f.a2) == std::set<EventId>{f.a1, f.b1, f.a2});
}

TEST_CASE("same-sender concurrency yields evidence at ingest") {
    BackdateFixture f;
    auto evidence = detect_sender_backdating(f.store, f.store.get(f.a3), f.a3);
    REQUIRE(evidence.has_value());
    CHECK(evidence->sender == UserId{"a"});
    CHECK(evidence->event_a == f.a2);
    CHECK(evidence->event_b == f.a3);
}

TEST_CASE("undetectable backdating produces no evidence") {
    // c2 anchors at c1 but still descends the sender's latest event, so it
    // is indistinguishable from a late arrival.
    DagStore store;
    EventId c1 = put(store, ev("c", JoinOp{}));
    EventId d1 = put(store, ev("d", JoinOp{}, {c1}));
    EventId d2 = put(store, ev("d", WriteOp{"x"}, {d1}));
    Event c2e = ev("c", WriteOp{"y"}, {c1});
    EventId c2 = put(store, c2e);
    CHECK(store.concurrent(c2, d1));
    CHECK(store.concurrent(c2, d2));
    CHECK_FALSE(detect_sender_backdating(store, c2e, c2).has_value());
    CHECK_FALSE(detect_sender_backdating(store, store.get(d2), d2).has_value());
}

TEST_CASE("first event from a sender never yields evidence") {
    DagStore store;
    EventId g = put(store, ev("a", JoinOp{}));
    Event jb = ev("b", JoinOp{}, {g});
    EventId jb_id = put(store, jb);
    CHECK_FALSE(detect_sender_backdating(store, jb, jb_id).has_value());
}

TEST_CASE("sources_at_depth truncates the frontier") {
    BackdateFixture f;
    CHECK(f.store.sources_at_depth(0) == std::set<EventId>{f.a1});
    CHECK(f.store.sources_at_depth(1) == std::set<EventId>{std::min(f.b1, f.a3), std::max(f.b1, f.a3)});
    CHECK(f.store.sources_at_depth(2) == f.store.sources());
}

TEST_CASE("random DAGs: queries match brute-force oracles") {
    std::mt19937_64 rng(1234);
    std::size_t mismatches = 0;
    for (int round = 0; round < 500; ++round) {
        DagStore store;
        std::size_t n = 2 + rng() % 63;
        auto ids = build_random_dag(store, rng, n, 1 + rng() % 5);
        const std::size_t m = ids.size();

        CHECK(store.sources() == brute_sources(store));

        std::map<EventId, std::size_t> index;
        for (std::size_t i = 0; i < m; ++i) index[ids[i]] = i;

        // All-pairs: the library's precedes vs the DFS oracle.
        std::vector<std::vector<bool>> reach(m, std::vector<bool>(m, false));
        for (std::size_t yi = 0; yi < m; ++yi) {
            for (std::size_t xi = 0; xi < m; ++xi) {
                bool expected = dfs_reaches(store, ids[xi], ids[yi]);
                reach[xi][yi] = expected;
                if (store.precedes(ids[xi], ids[yi]) != expected) ++mismatches;
            }
        }

        // Partial order: reflexive, antisymmetric, transitive; concurrency
        // is symmetric.
        for (std::size_t x = 0; x < m; ++x) {
            CHECK(reach[x][x]);
            for (std::size_t y = 0; y < m; ++y) {
                if (x != y && reach[x][y]) CHECK_FALSE(reach[y][x]);
            }
        }
        for (std::size_t t = 0; t < 300; ++t) {
            std::size_t x = rng() % m, y = rng() % m, z = rng() % m;
            if (reach[x][y] && reach[y][z]) CHECK(reach[x][z]);
            CHECK(store.concurrent(ids[x], ids[y]) == store.concurrent(ids[y], ids[x]));
        }

        // ancestors equals the fixpoint closure; every event sits under a
        // source; children are the exact inverse of preds.
        const EventId& probe = ids[rng() % m];
        CHECK(store.ancestors(probe) == closure_fixpoint(store, probe));
        for (std::size_t i = 0; i < m; ++i) {
            bool covered = false;
            for (const auto& s : store.sources()) covered |= reach[i][index.at(s)];
            CHECK(covered);
            CHECK((store.children(ids[i]).empty() == (store.sources().count(ids[i]) != 0)));
            for (const auto& c : store.children(ids[i])) {
                const auto& preds = store.get(c).preds;
                CHECK(std::find(preds.begin(), preds.end(), ids[i]) != preds.end());
            }
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("detection is complete on two-events-per-sender stores") {
    std::mt19937_64 rng(777);
    int concurrent_cases = 0;
    for (int round = 0; round < 100; ++round) {
        DagStore store;
        auto ids = build_random_dag(store, rng, 4 + rng() % 12, 4);

        // Pick a sender with exactly one event and give it a second one
        // anchored somewhere it has (possibly) already moved past.
        std::map<UserId, std::vector<EventId>> by_sender;
        for (const auto& id : ids) by_sender[store.get(id).sender].push_back(id);
        auto it = std::find_if(by_sender.begin(), by_sender.end(),
                               [](const auto& kv) { return kv.second.size() == 1; });
        if (it == by_sender.end()) continue;
        const UserId& sender = it->first;
        const EventId& first = it->second.front();

        const EventId& anchor = ids[rng() % ids.size()];
        Event second = make_event(sender, WriteOp{"w" + std::to_string(round)}, {anchor});
        EventId second_id = event_id(second);
        if (store.ingest(second, second_id) != IngestResult::Accepted) continue;

        bool expect_evidence = store.concurrent(first, second_id);
        if (expect_evidence) ++concurrent_cases;
        auto evidence = detect_sender_backdating(store, second, second_id);
        CHECK(evidence.has_value() == expect_evidence);
        if (evidence) {
            CHECK(evidence->sender == sender);
            CHECK(store.concurrent(evidence->event_a, evidence->event_b));
        }
    }
    CHECK(concurrent_cases > 10);  // the generator must actually cover the case
}

TEST_CASE("store closure holds for every random store") {
    std::mt19937_64 rng(4321);
    DagStore store;
    build_random_dag(store, rng, 40, 3);
    for (const auto& [id, event] : store.events()) {
        for (const auto& p : event.preds) CHECK(store.contains(p));
    }
}
