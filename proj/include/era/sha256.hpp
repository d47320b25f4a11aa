#pragma once

#include <cstdint>
#include <span>

#include "era/types.hpp"

namespace era {

/// SHA-256 digest of a byte span, packaged as an EventId.
EventId sha256(std::span<const std::uint8_t> data);

}  // namespace era
