#pragma once

#include <cstdint>
#include <string_view>

namespace dirac1d {

/// FNV-1a, used for config hashes and output checksums. Platform independent
/// for identical byte streams.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace dirac1d
