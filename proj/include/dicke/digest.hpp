// digest.hpp - FNV-1a checksums for artifact bookkeeping
#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace dicke {

inline constexpr std::uint64_t fnv_offset = 0xcbf29ce484222325ull;

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = fnv_offset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = fnv_offset) {
    return fnv1a(s.data(), s.size(), h);
}

inline std::uint64_t file_digest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("digest: cannot open " + path);
    std::uint64_t h = fnv_offset;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        h = fnv1a(buf, static_cast<std::size_t>(is.gcount()), h);
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace dicke
