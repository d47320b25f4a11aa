#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "era/types.hpp"

namespace era {

/// Raised when an event cannot be encoded (oversized field) or a byte
/// sequence is not a canonical event encoding.
class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical byte encoding. The same logical event always yields identical
/// bytes: fixed field order, length prefixes, preds sorted ascending.
///
/// Layout: version 0x01 | sender_len(1) | sender | op_tag(1) | op body |
/// pred_count(4 BE) | preds (32 bytes each, ascending).
/// Op bodies: Promote/Demote = target_len(1) | target | role(1);
/// Write = payload_len(4 BE) | payload; Epoch = seq(8 BE); Join = empty.
std::vector<std::uint8_t> canonical_encode(const Event& event);

/// Strict inverse of canonical_encode: rejects trailing bytes, unknown tags,
/// out-of-range roles and preds that are not strictly ascending.
Event decode_event(std::span<const std::uint8_t> bytes);

/// Content address: SHA-256 of the canonical encoding.
EventId event_id(const Event& event);

}  // namespace era
