#include <doctest.h>

#include <random>

#include "era/encoding.hpp"
#include "oracles.hpp"

using namespace era;
using era::testing::ev;

namespace {

Event random_event(std::mt19937_64& rng) {
    std::string sender(1 + rng() % 12, 'a');
    for (auto& c : sender) c = static_cast<char>('a' + rng() % 26);
    Operation op;
    switch (rng() % 5) {
        case 0: op = JoinOp{}; break;
        case 1: op = PromoteOp{UserId{"t" + std::to_string(rng() % 9)},
                               static_cast<Role>(rng() % 3)}; break;
        case 2: op = DemoteOp{UserId{"t" + std::to_string(rng() % 9)},
                              static_cast<Role>(rng() % 3)}; break;
        case 3: {
            std::string payload(rng() % 40, '\0');
            for (auto& c : payload) c = static_cast<char>(rng() % 256);
            op = WriteOp{std::move(payload)};
            break;
        }
        default: op = EpochOp{rng()}; break;
    }
    std::vector<EventId> preds(rng() % 4);
    for (auto& p : preds) {
        for (auto& b : p.bytes) b = static_cast<std::uint8_t>(rng());
    }
    return make_event(UserId{std::move(sender)}, std::move(op), std::move(preds));
}

}  // namespace

TEST_CASE("smallest legal event encodes to the fixed byte layout") {
    auto bytes = canonical_encode(ev("a", JoinOp{}));
    std::vector<std::uint8_t> expected = {0x01, 0x01, 0x61, 0x00, 0x00, 0x00, 0x00, 0x00};
    CHECK(bytes == expected);
}

TEST_CASE("op bodies follow the wire layout") {
    EventId p{};
    p.bytes[31] = 0x07;
    auto promote = canonical_encode(ev("a", PromoteOp{UserId{"b"}, Role::Admin}, {p}));
    std::vector<std::uint8_t> head = {0x01, 0x01, 0x61, 0x01, 0x01, 0x62, 0x02,
                                      0x00, 0x00, 0x00, 0x01};
    REQUIRE(promote.size() == head.size() + 32);
    CHECK(std::equal(head.begin(), head.end(), promote.begin()));
    CHECK(promote.back() == 0x07);

    auto write = canonical_encode(ev("a", WriteOp{"hi"}, {p}));
    std::vector<std::uint8_t> write_head = {0x01, 0x01, 0x61, 0x03, 0x00, 0x00, 0x00,
                                            0x02, 0x68, 0x69, 0x00, 0x00, 0x00, 0x01};
    REQUIRE(write.size() == write_head.size() + 32);
    CHECK(std::equal(write_head.begin(), write_head.end(), write.begin()));

    auto epoch = canonical_encode(ev("f1", EpochOp{3}, {p}));
    std::vector<std::uint8_t> epoch_head = {0x01, 0x02, 0x66, 0x31, 0x04, 0x00, 0x00, 0x00,
                                            0x00, 0x00, 0x00, 0x00, 0x03, 0x00, 0x00, 0x00,
                                            0x01};
    REQUIRE(epoch.size() == epoch_head.size() + 32);
    CHECK(std::equal(epoch_head.begin(), epoch_head.end(), epoch.begin()));
}

TEST_CASE("ids match an independently computed reference") {
    // Expected digests computed with a separate encoder + SHA-256
    // implementation outside this codebase.
    EventId ja = event_id(ev("a", JoinOp{}));
    CHECK(ja.hex() == "0896a3fb59a65fefa381422cb4225b198cdb08464a76531b97622fdc0407594c");

    EventId jb = event_id(ev("b", JoinOp{}, {ja}));
    CHECK(jb.hex() == "106a5191fdec67dbc1b332afcaec44354a0f9aac8e2b71ff8dd35c6c3738d5a3");

    EventId promote = event_id(ev("a", PromoteOp{UserId{"b"}, Role::Writer}, {jb}));
    CHECK(promote.hex() == "5f18b5024d073a947b150512ce5a028305d57e2579d4808652fe62aeff49f39b");

    EventId demote = event_id(ev("a", DemoteOp{UserId{"b"}, Role::Reader}, {promote}));
    CHECK(demote.hex() == "0acfc737eb3612989ddca1cef6ebc7aec8699a1b64858f431a8f56919bf6ccb6");

    EventId self_demote = event_id(ev("a", DemoteOp{UserId{"a"}, Role::Reader}, {promote}));
    CHECK(self_demote.hex() == "85ec68dade50060bd68c532fb26920def2a3c4071e0c4068992990ba710713f6");
}

TEST_CASE("preds are canonicalized before encoding") {
    EventId p1{}, p2{};
    p1.bytes[0] = 0x01;
    p2.bytes[0] = 0x02;
    Event a{UserId{"a"}, WriteOp{"x"}, {p1, p2}};
    Event b{UserId{"a"}, WriteOp{"x"}, {p2, p1}};
    CHECK(canonical_encode(a) == canonical_encode(b));
    CHECK(event_id(a) == event_id(b));
}

TEST_CASE("identical events share ids and payload changes move them") {
    EventId p{};
    Event a = ev("a", WriteOp{"hello"}, {p});
    CHECK(event_id(a) == event_id(ev("a", WriteOp{"hello"}, {p})));
    CHECK(event_id(a) != event_id(ev("a", WriteOp{"hellp"}, {p})));
}

TEST_CASE("oversized and empty fields are encoding errors") {
    CHECK_THROWS_AS(canonical_encode(ev(std::string(256, 'x'), JoinOp{})), EncodingError);
    CHECK_THROWS_AS(canonical_encode(ev("", JoinOp{})), EncodingError);
    CHECK_THROWS_AS(canonical_encode(ev("a", PromoteOp{UserId{std::string(300, 't')}, Role::Admin})),
                    EncodingError);
}

TEST_CASE("decode round-trips 1000 random events") {
    std::mt19937_64 rng(20260809);
    for (int i = 0; i < 1000; ++i) {
        Event e = random_event(rng);
        Event back = decode_event(canonical_encode(e));
        CHECK(back == e);
    }
}

TEST_CASE("decode rejects malformed encodings") {
    auto bytes = canonical_encode(ev("a", JoinOp{}));

    auto bad_version = bytes;
    bad_version[0] = 0x02;
    CHECK_THROWS_AS(decode_event(bad_version), EncodingError);

    auto trailing = bytes;
    trailing.push_back(0x00);
    CHECK_THROWS_AS(decode_event(trailing), EncodingError);

    auto bad_tag = bytes;
    bad_tag[3] = 0x09;
    CHECK_THROWS_AS(decode_event(bad_tag), EncodingError);

    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_event(truncated), EncodingError);

    // duplicate preds are not strictly ascending
    EventId p{};
    Event dup{UserId{"a"}, JoinOp{}, {p}};
    auto enc = canonical_encode(dup);
    enc.insert(enc.end(), p.bytes.begin(), p.bytes.end());
    enc[4 + 3] = 0x02;  // patch pred_count to 2
    CHECK_THROWS_AS(decode_event(enc), EncodingError);
}

TEST_CASE("event id hex round-trips") {
    EventId id = event_id(ev("a", JoinOp{}));
    auto back = EventId::from_hex(id.hex());
    REQUIRE(back.has_value());
    CHECK(*back == id);
    CHECK_FALSE(EventId::from_hex("zz").has_value());
}
