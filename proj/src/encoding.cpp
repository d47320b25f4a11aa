#include "era/encoding.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "era/sha256.hpp"

namespace era {

namespace {

constexpr std::uint8_t kVersion = 0x01;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_user(std::vector<std::uint8_t>& out, const UserId& user, const char* field) {
    if (user.name.empty() || user.name.size() > 255) {
        throw EncodingError(std::string(field) + " must be 1..255 bytes");
    }
    out.push_back(static_cast<std::uint8_t>(user.name.size()));
    out.insert(out.end(), user.name.begin(), user.name.end());
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | bytes_[pos_++];
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | bytes_[pos_++];
        return v;
    }

    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    EventId id() {
        need(32);
        EventId out;
        std::memcpy(out.bytes.data(), bytes_.data() + pos_, 32);
        pos_ += 32;
        return out;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw EncodingError("truncated event encoding");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

Role decode_role(std::uint8_t b) {
    if (b > static_cast<std::uint8_t>(Role::Admin)) throw EncodingError("invalid role byte");
    return static_cast<Role>(b);
}

UserId decode_user(Reader& r, const char* field) {
    std::uint8_t len = r.u8();
    if (len == 0) throw EncodingError(std::string(field) + " must be non-empty");
    return UserId{r.str(len)};
}

}  // namespace

std::vector<std::uint8_t> canonical_encode(const Event& event) {
    std::vector<std::uint8_t> out;
    out.push_back(kVersion);
    put_user(out, event.sender, "sender");
    out.push_back(op_tag(event.op));

    struct Body {
        std::vector<std::uint8_t>& out;
        void operator()(const JoinOp&) const {}
        void operator()(const PromoteOp& p) const {
            put_user(out, p.target, "target");
            out.push_back(static_cast<std::uint8_t>(p.role));
        }
        void operator()(const DemoteOp& d) const {
            put_user(out, d.target, "target");
            out.push_back(static_cast<std::uint8_t>(d.role));
        }
        void operator()(const WriteOp& w) const {
            if (w.payload.size() > std::numeric_limits<std::uint32_t>::max()) {
                throw EncodingError("payload exceeds 2^32-1 bytes");
            }
            put_u32(out, static_cast<std::uint32_t>(w.payload.size()));
            out.insert(out.end(), w.payload.begin(), w.payload.end());
        }
        void operator()(const EpochOp& e) const { put_u64(out, e.seq); }
    };
    std::visit(Body{out}, event.op);

    std::vector<EventId> preds = event.preds;
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    put_u32(out, static_cast<std::uint32_t>(preds.size()));
    for (const auto& p : preds) {
        out.insert(out.end(), p.bytes.begin(), p.bytes.end());
    }
    return out;
}

Event decode_event(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (r.u8() != kVersion) throw EncodingError("unsupported version byte");
    Event event;
    event.sender = decode_user(r, "sender");
    std::uint8_t tag = r.u8();
    switch (tag) {
        case 0x00:
            event.op = JoinOp{};
            break;
        case 0x01: {
            UserId target = decode_user(r, "target");
            event.op = PromoteOp{std::move(target), decode_role(r.u8())};
            break;
        }
        case 0x02: {
            UserId target = decode_user(r, "target");
            event.op = DemoteOp{std::move(target), decode_role(r.u8())};
            break;
        }
        case 0x03: {
            std::uint32_t len = r.u32();
            event.op = WriteOp{r.str(len)};
            break;
        }
        case 0x04:
            event.op = EpochOp{r.u64()};
            break;
        default:
            throw EncodingError("unknown op tag");
    }
    std::uint32_t count = r.u32();
    event.preds.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        EventId p = r.id();
        if (!event.preds.empty() && !(event.preds.back() < p)) {
            throw EncodingError("preds not strictly ascending");
        }
        event.preds.push_back(p);
    }
    if (!r.done()) throw EncodingError("trailing bytes after event");
    return event;
}

EventId event_id(const Event& event) {
    return sha256(canonical_encode(event));
}

}  // namespace era
