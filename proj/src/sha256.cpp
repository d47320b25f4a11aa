#include "era/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace era {

EventId sha256(std::span<const std::uint8_t> data) {
    EventId id;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), id.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != id.bytes.size()) {
        throw std::runtime_error("sha256: digest computation failed");
    }
    return id;
}

}  // namespace era
