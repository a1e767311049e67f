#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace docpipe {

// SHA-256 of `data`, lowercase hex. `hex_chars` truncates the output
// (64 = full digest).
std::string sha256_hex(std::string_view data, std::size_t hex_chars = 64);

// FNV-1a 64-bit running hash. Each absorbed byte goes through an invertible
// mix, so any single-byte change is guaranteed to alter the final value —
// that is the property the index checksum relies on.
class Fnv1a64 {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a64(std::string_view data) {
    Fnv1a64 h;
    h.update(data.data(), data.size());
    return h.value();
}

} // namespace docpipe
